#include "fsl/spaces.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "fsl/apps.hpp"

namespace fsl {

NormFlavor norm_flavor_from_string(const std::string& s) {
    if (s == "dyadic") return NormFlavor::Dyadic;
    if (s == "continuous") return NormFlavor::Continuous;
    if (s == "peetre") return NormFlavor::Peetre;
    if (s == "g-function") return NormFlavor::GFunction;
    if (s == "lusin") return NormFlavor::Lusin;
    throw std::invalid_argument("unknown norm flavor: " + s);
}

std::string to_string(NormFlavor f) {
    switch (f) {
        case NormFlavor::Dyadic: return "dyadic";
        case NormFlavor::Continuous: return "continuous";
        case NormFlavor::Peetre: return "peetre";
        case NormFlavor::GFunction: return "g-function";
        case NormFlavor::Lusin: return "lusin";
    }
    return "?";
}

const SpectralProfile& NormParams::active_profile() const {
    if (profile) return *profile;
    if (pou) return pou->psi;
    throw std::invalid_argument("NormParams: no profile or partition set");
}

void NormParams::validate(bool triebel) const {
    if (!weight) throw std::invalid_argument("NormParams: weight missing");
    if (!(p > 0.0)) throw std::invalid_argument("NormParams: p must be positive");
    if (!(q > 0.0)) throw std::invalid_argument("NormParams: q must be positive");
    if (triebel && std::isinf(p))
        throw std::invalid_argument("NormParams: p = infinity needs f_infinity_norm");
    active_profile();
    const bool needs_grid = flavor == NormFlavor::Continuous || flavor == NormFlavor::GFunction ||
                            flavor == NormFlavor::Lusin;
    if (needs_grid && !grid) throw std::invalid_argument("NormParams: flavor needs a scale grid");
    if (flavor == NormFlavor::Peetre && !(lambda_exp > 0.0))
        throw std::invalid_argument("NormParams: peetre flavor needs lambda_exp > 0");
    if (flavor == NormFlavor::Lusin) {
        if (std::isinf(q)) throw std::invalid_argument("NormParams: lusin needs q < infinity");
        if (!(aperture >= 1.0)) throw std::invalid_argument("NormParams: aperture must be >= 1");
    }
    if (flavor == NormFlavor::GFunction && !(lambda_exp > 0.0))
        throw std::invalid_argument("NormParams: g-function needs lambda_exp > 0");
}

namespace {

struct ScalePoint {
    double t = 0.0;      ///< scale
    double weight = 1.0; ///< quadrature weight (1 for dyadic sums)
    double deriv = 0.0;  ///< t^{-alpha} factor, precomputed
};

std::vector<ScalePoint> scale_points(const NormParams& np) {
    std::vector<ScalePoint> pts;
    if (np.flavor == NormFlavor::Dyadic ||
        (np.flavor == NormFlavor::Peetre && np.grid == nullptr)) {
        for (int j = np.levels.j_min; j <= np.levels.j_max; ++j) {
            const double t = std::pow(2.0, -j);
            pts.push_back({t, 1.0, std::pow(2.0, j * np.alpha)});
        }
    } else {
        for (std::size_t i = 0; i < np.grid->t().size(); ++i) {
            const double t = np.grid->t()[i];
            pts.push_back({t, np.grid->w()[i], std::pow(t, -np.alpha)});
        }
    }
    return pts;
}

} // namespace

NormValue besov_norm(const SelfAdjointOperator& op, const Vec& f, const NormParams& np) {
    np.validate(false);
    if (np.flavor == NormFlavor::GFunction || np.flavor == NormFlavor::Lusin)
        throw std::invalid_argument("besov_norm: square-function flavors are Triebel-Lizorkin");

    const auto& prof = np.active_profile();
    const CoeffField field(op, f);
    const auto pts = scale_points(np);

    NormValue out;
    double acc = 0.0, sup = 0.0;
    for (const auto& sp : pts) {
        Vec g = field.at(prof, sp.t);
        if (np.flavor == NormFlavor::Peetre)
            g = peetre_maximal_of_field(op.space(), g, sp.t, np.lambda_exp);
        const double term = sp.deriv * weighted_lp_norm(op.space(), g, np.p, *np.weight);
        out.per_scale.push_back({sp.t, term});
        if (std::isinf(np.q)) sup = std::max(sup, term);
        else acc += sp.weight * std::pow(term, np.q);
    }
    out.value = std::isinf(np.q) ? sup : std::pow(acc, 1.0 / np.q);
    return out;
}

Vec lusin_functional(const MetricMeasureSpace& s, const std::vector<Vec>& field,
                     const ScaleGrid& grid, double alpha, double q, double aperture) {
    const int n = static_cast<int>(s.size());
    Vec acc(s.size(), 0.0);
    for (std::size_t i = 0; i < grid.t().size(); ++i) {
        const double t = grid.t()[i];
        const double ta = std::pow(t, -alpha);
        const double wq = grid.w()[i];
        Vec powered(s.size());
        for (std::size_t y = 0; y < s.size(); ++y)
            powered[y] = std::pow(ta * std::abs(field[i][y]), q) * s.mu(static_cast<int>(y));
        for (int x = 0; x < n; ++x) {
            const double vol = s.volume(x, t);
            if (vol <= 0.0) continue;
            // members of B(x, a t) via the sorted order
            const auto& ids = s.sorted_ids(x);
            const auto& d = s.sorted_dists(x);
            double inner = 0.0;
            for (int k = 0; k < n && d[static_cast<std::size_t>(k)] < aperture * t; ++k)
                inner += powered[static_cast<std::size_t>(ids[static_cast<std::size_t>(k)])];
            acc[static_cast<std::size_t>(x)] += wq * inner / vol;
        }
    }
    for (double& v : acc) v = std::pow(v, 1.0 / q);
    return acc;
}

Vec g_functional(const MetricMeasureSpace& s, const std::vector<Vec>& field,
                 const ScaleGrid& grid, double alpha, double q, double lambda_exp) {
    const int n = static_cast<int>(s.size());
    Vec acc(s.size(), 0.0);
    for (std::size_t i = 0; i < grid.t().size(); ++i) {
        const double t = grid.t()[i];
        const double ta = std::pow(t, -alpha);
        const double wq = grid.w()[i];
        Vec powered(s.size());
        for (std::size_t y = 0; y < s.size(); ++y)
            powered[y] = std::pow(ta * std::abs(field[i][y]), q) * s.mu(static_cast<int>(y));
        for (int x = 0; x < n; ++x) {
            const double vol = s.volume(x, t);
            if (vol <= 0.0) continue;
            double inner = 0.0;
            for (int y = 0; y < n; ++y)
                inner += powered[static_cast<std::size_t>(y)] *
                         std::pow(1.0 + s.d(x, y) / t, -lambda_exp * q);
            acc[static_cast<std::size_t>(x)] += wq * inner / vol;
        }
    }
    for (double& v : acc) v = std::pow(v, 1.0 / q);
    return acc;
}

NormValue triebel_norm(const SelfAdjointOperator& op, const Vec& f, const NormParams& np) {
    np.validate(true);
    const auto& s = op.space();
    const auto& prof = np.active_profile();
    const CoeffField field(op, f);

    NormValue out;

    if (np.flavor == NormFlavor::GFunction || np.flavor == NormFlavor::Lusin) {
        std::vector<Vec> slices;
        slices.reserve(np.grid->t().size());
        for (double t : np.grid->t()) slices.push_back(field.at(prof, t));
        const Vec sq = (np.flavor == NormFlavor::Lusin)
                           ? lusin_functional(s, slices, *np.grid, np.alpha, np.q, np.aperture)
                           : g_functional(s, slices, *np.grid, np.alpha, np.q, np.lambda_exp);
        out.value = weighted_lp_norm(s, sq, np.p, *np.weight);
        return out;
    }

    const auto pts = scale_points(np);
    Vec acc(s.size(), 0.0);
    const bool qinf = std::isinf(np.q);
    for (const auto& sp : pts) {
        Vec g = field.at(prof, sp.t);
        if (np.flavor == NormFlavor::Peetre)
            g = peetre_maximal_of_field(s, g, sp.t, np.lambda_exp);
        double scale_term = 0.0;
        for (std::size_t x = 0; x < s.size(); ++x) {
            const double v = sp.deriv * std::abs(g[x]);
            if (qinf) acc[x] = std::max(acc[x], v);
            else acc[x] += sp.weight * std::pow(v, np.q);
            scale_term = std::max(scale_term, v);
        }
        out.per_scale.push_back({sp.t, scale_term});
    }
    if (!qinf)
        for (double& v : acc) v = std::pow(v, 1.0 / np.q);
    out.value = weighted_lp_norm(s, acc, np.p, *np.weight);
    return out;
}

NormValue f_infinity_norm(const SelfAdjointOperator& op, const Vec& f, double alpha, double q,
                          const Weight& w, NormFlavor flavor, const PartitionOfUnity& pou,
                          const ScaleGrid* grid, double lambda_exp) {
    const auto& s = op.space();
    const auto balls = enumerate_distinct_balls(s);
    const CoeffField field(op, f);
    NormValue out;

    if (flavor == NormFlavor::Dyadic) {
        const LevelRange lr = level_range(op);
        const int nj = lr.j_max - lr.j_min + 1;
        // T(y, j) = (2^{j alpha} |psi_j f(y)|)^q mu(y), suffix-summed in j.
        std::vector<Vec> term(static_cast<std::size_t>(nj));
        for (int jj = 0; jj < nj; ++jj) {
            const int j = lr.j_min + jj;
            const Vec g = field.at(pou.psi, std::pow(2.0, -j));
            term[static_cast<std::size_t>(jj)].resize(s.size());
            for (std::size_t y = 0; y < s.size(); ++y)
                term[static_cast<std::size_t>(jj)][y] =
                    std::isinf(q) ? std::pow(2.0, j * alpha) * std::abs(g[y]) * s.mu(static_cast<int>(y))
                                  : std::pow(std::pow(2.0, j * alpha) * std::abs(g[y]), q) *
                                        s.mu(static_cast<int>(y));
        }
        std::vector<Vec> suffix(static_cast<std::size_t>(nj) + 1, Vec(s.size(), 0.0));
        if (!std::isinf(q))
            for (int jj = nj - 1; jj >= 0; --jj)
                for (std::size_t y = 0; y < s.size(); ++y)
                    suffix[static_cast<std::size_t>(jj)][y] =
                        suffix[static_cast<std::size_t>(jj) + 1][y] +
                        term[static_cast<std::size_t>(jj)][y];

        for (const auto& b : balls) {
            const double r = b.r_hi;
            const int jstart =
                std::max(lr.j_min, static_cast<int>(std::ceil(-std::log2(r) - 1e-12)));
            if (jstart > lr.j_max) continue;
            const double vol = s.prefix_mu(b.center)[static_cast<std::size_t>(b.count)];
            const auto& ids = s.sorted_ids(b.center);
            double wq = 0.0;
            for (int k = 0; k < b.count; ++k)
                wq += w[ids[static_cast<std::size_t>(k)]] *
                      s.mu(ids[static_cast<std::size_t>(k)]);
            if (wq <= 0.0) continue;
            const double front = vol / (wq * wq);
            if (std::isinf(q)) {
                for (int jj = jstart - lr.j_min; jj < nj; ++jj) {
                    double sum = 0.0;
                    for (int k = 0; k < b.count; ++k)
                        sum += term[static_cast<std::size_t>(jj)]
                                   [static_cast<std::size_t>(ids[static_cast<std::size_t>(k)])];
                    out.value = std::max(out.value, front * sum);
                }
            } else {
                double sum = 0.0;
                for (int k = 0; k < b.count; ++k)
                    sum += suffix[static_cast<std::size_t>(jstart - lr.j_min)]
                               [static_cast<std::size_t>(ids[static_cast<std::size_t>(k)])];
                out.value = std::max(out.value, std::pow(front * sum, 1.0 / q));
            }
        }
        return out;
    }

    // Continuous / Peetre: N_{alpha,q,L} over balls with the ball radius as
    // the scale cutoff. cum(y, i) accumulates the inner integrand up to t_i.
    if (!grid) throw std::invalid_argument("f_infinity_norm: flavor needs a grid");
    if (std::isinf(q))
        throw std::invalid_argument("f_infinity_norm: continuous flavors need q < infinity");
    const std::size_t ng = grid->t().size();
    std::vector<Vec> cum(ng + 1, Vec(s.size(), 0.0));
    for (std::size_t i = 0; i < ng; ++i) {
        const double t = grid->t()[i];
        Vec g = field.at(pou.psi, t);
        if (flavor == NormFlavor::Peetre) g = peetre_maximal_of_field(s, g, t, lambda_exp);
        for (std::size_t y = 0; y < s.size(); ++y)
            cum[i + 1][y] = cum[i][y] + grid->w()[i] *
                                            std::pow(std::pow(t, -alpha) * std::abs(g[y]), q) *
                                            s.mu(static_cast<int>(y));
    }
    for (const auto& b : balls) {
        const double r = b.r_hi;
        std::size_t icut = 0;
        while (icut < ng && grid->t()[icut] < r) ++icut;
        if (icut == 0) continue;
        const double vol = s.prefix_mu(b.center)[static_cast<std::size_t>(b.count)];
        const auto& ids = s.sorted_ids(b.center);
        double wq = 0.0, sum = 0.0;
        for (int k = 0; k < b.count; ++k) {
            const int y = ids[static_cast<std::size_t>(k)];
            wq += w[y] * s.mu(y);
            sum += cum[icut][static_cast<std::size_t>(y)];
        }
        if (wq <= 0.0) continue;
        out.value = std::max(out.value, std::pow(vol / (wq * wq) * sum, 1.0 / q));
    }
    return out;
}

double bmo_l_norm(const SelfAdjointOperator& op, const Vec& f, const Weight& w) {
    const auto& s = op.space();
    const auto balls = enumerate_distinct_balls(s);
    const CoeffField field(op, f);

    std::map<double, Vec> osc; // r -> |(I - e^{-r^2 L}) f|
    for (const auto& b : balls)
        if (!osc.count(b.r_hi)) {
            const double r = b.r_hi;
            Vec g = field.at_multiplier([r](double l) { return 1.0 - std::exp(-r * r * l); });
            for (double& v : g) v = std::abs(v);
            osc.emplace(r, std::move(g));
        }

    double best = 0.0;
    for (const auto& b : balls) {
        const auto& g = osc.at(b.r_hi);
        const auto& ids = s.sorted_ids(b.center);
        double wq = 0.0, sum = 0.0;
        for (int k = 0; k < b.count; ++k) {
            const int y = ids[static_cast<std::size_t>(k)];
            wq += w[y] * s.mu(y);
            sum += g[static_cast<std::size_t>(y)] * s.mu(y);
        }
        if (wq > 0.0) best = std::max(best, sum / wq);
    }
    return best;
}

double bmo_classical_norm(const MetricMeasureSpace& s, const Vec& f, const Weight& w) {
    const auto balls = enumerate_distinct_balls(s);
    double best = 0.0;
    for (const auto& b : balls) {
        const auto& ids = s.sorted_ids(b.center);
        double vol = 0.0, mean = 0.0, wq = 0.0;
        for (int k = 0; k < b.count; ++k) {
            const int y = ids[static_cast<std::size_t>(k)];
            vol += s.mu(y);
            mean += f[static_cast<std::size_t>(y)] * s.mu(y);
            wq += w[y] * s.mu(y);
        }
        mean /= vol;
        double sum = 0.0;
        for (int k = 0; k < b.count; ++k) {
            const int y = ids[static_cast<std::size_t>(k)];
            sum += std::abs(f[static_cast<std::size_t>(y)] - mean) * s.mu(y);
        }
        if (wq > 0.0) best = std::max(best, sum / wq);
    }
    return best;
}

double hardy_norm(const SelfAdjointOperator& op, const Vec& f, double p, const Weight& w,
                  const ScaleGrid& grid) {
    if (!(p > 0.0) || p > 1.0) throw std::invalid_argument("hardy_norm: need 0 < p <= 1");
    static const SpectralProfile psi1 = heat_profile(1);
    NormParams np;
    np.alpha = 0.0;
    np.p = p;
    np.q = 2.0;
    np.weight = &w;
    np.profile = &psi1;
    np.grid = &grid;
    np.aperture = 1.0;
    np.flavor = NormFlavor::Lusin;
    return triebel_norm(op, f, np).value;
}

double sobolev_norm(const SelfAdjointOperator& op, const Vec& f, double s, double p,
                    const Weight& w) {
    const Vec g = fractional_power(op, f, s);
    return weighted_lp_norm(op.space(), g, p, w);
}

} // namespace fsl
