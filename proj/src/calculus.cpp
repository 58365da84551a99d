#include "fsl/calculus.hpp"

#include <algorithm>
#include <cmath>

namespace fsl {

namespace {

double bump(double u, double shape) {
    if (std::abs(u) >= 1.0) return 0.0;
    return std::exp(-shape / (1.0 - u * u));
}

} // namespace

SpectralProfile heat_profile(int m) {
    SpectralProfile p;
    p.eval = [m](double xi) {
        return std::pow(xi * xi, m) * std::exp(-xi * xi);
    };
    p.compact_support = false;
    p.vanish_order = m;
    p.name = "heat-m" + std::to_string(m);
    return p;
}

SpectralProfile sm_profile(int m) { return heat_profile(m); }

PartitionOfUnity make_partition_of_unity(double shape) {
    // eta(lambda) = bump(log2 lambda) has support exactly [1/2, 2]; dividing
    // by the 1-periodic-in-log2 sum of its dyadic dilates makes the dilates
    // of the quotient telescope to 1 on (0, infinity).
    auto psi_eval = [shape](double xi) -> double {
        if (!(xi > 0.0)) return 0.0;
        const double u = std::log2(xi);
        if (std::abs(u) >= 1.0) return 0.0;
        const double num = bump(u, shape);
        double den = 0.0;
        // only fractional offsets within (-1, 1) contribute
        const double frac = u - std::floor(u);
        den = bump(frac, shape) + bump(frac - 1.0, shape);
        return num / den;
    };

    PartitionOfUnity pou;
    pou.shape = shape;
    pou.psi.eval = psi_eval;
    pou.psi.compact_support = true;
    pou.psi.support_lo = 0.5;
    pou.psi.support_hi = 2.0;
    pou.psi.vanish_order = 0;
    pou.psi.name = "partition(shape=" + std::to_string(shape) + ")";
    pou.c_psi = 1.0 / profile_log_integral(pou.psi);
    return pou;
}

SpectralProfile make_compact_phi(double half_width) {
    if (!(half_width > 0.0)) throw std::invalid_argument("make_compact_phi: bad half width");

    // Midpoint grid for phi(s) = A * bump(s / half_width) on (-hw, hw) with
    // integral 2 pi; then Phi(xi) = (1/2pi) integral phi(s) cos(s xi) ds.
    // 256 nodes resolve the few radians of phase the calculus ever asks for.
    const int m = 256;
    auto nodes = std::make_shared<std::vector<std::pair<double, double>>>(); // (s, phi(s) ds / 2pi)
    double raw = 0.0;
    const double ds = 2.0 * half_width / m;
    for (int i = 0; i < m; ++i) {
        const double s = -half_width + (i + 0.5) * ds;
        raw += bump(s / half_width, 1.0) * ds;
    }
    const double amplitude = 2.0 * M_PI / raw;
    for (int i = 0; i < m; ++i) {
        const double s = -half_width + (i + 0.5) * ds;
        nodes->push_back({s, amplitude * bump(s / half_width, 1.0) * ds / (2.0 * M_PI)});
    }

    SpectralProfile phi;
    phi.eval = [nodes](double xi) {
        double acc = 0.0;
        for (const auto& [s, wgt] : *nodes) acc += wgt * std::cos(s * xi);
        return acc;
    };
    phi.compact_support = false; // compact in the *wave* variable, not in xi
    phi.vanish_order = 0;
    phi.name = "compact-phi(hw=" + std::to_string(half_width) + ")";

    // Needed downstream as an atomic-decomposition normalizer.
    for (double xi = 0.5; xi <= 2.0; xi += 0.01)
        if (!(phi.eval(xi) > 0.0))
            throw std::runtime_error("make_compact_phi: positivity on [1/2,2] failed");
    return phi;
}

LevelRange level_range(const SelfAdjointOperator& op, int margin) {
    const double lo = std::sqrt(op.lambda_min_positive());
    const double hi = std::sqrt(op.lambda_max());
    LevelRange r;
    r.j_min = static_cast<int>(std::floor(std::log2(lo))) - margin;
    r.j_max = static_cast<int>(std::ceil(std::log2(hi))) + margin;
    return r;
}

ScaleGrid ScaleGrid::for_window(double t_lo, double t_hi, int per_octave) {
    if (!(t_lo > 0.0) || !(t_hi > t_lo)) throw std::invalid_argument("ScaleGrid: bad window");
    if (per_octave < 1) throw std::invalid_argument("ScaleGrid: need per_octave >= 1");
    ScaleGrid g;
    g.per_octave_ = per_octave;
    // octave nu covers (2^{-nu-1}, 2^{-nu}]
    g.nu_fine_ = static_cast<int>(std::ceil(-std::log2(t_lo))) - 1;   // finest octave index
    g.nu_coarse_ = static_cast<int>(std::floor(-std::log2(t_hi)));   // coarsest octave index
    if (g.nu_coarse_ > g.nu_fine_) g.nu_coarse_ = g.nu_fine_;
    for (int nu = g.nu_fine_; nu >= g.nu_coarse_; --nu) {
        const double lo = std::pow(2.0, -nu - 1);
        for (int i = 0; i < per_octave; ++i) {
            g.t_.push_back(lo * std::pow(2.0, (i + 0.5) / per_octave));
            g.w_.push_back(std::log(2.0) / per_octave);
        }
    }
    return g;
}

ScaleGrid ScaleGrid::for_operator(const SelfAdjointOperator& op, int per_octave,
                                  int margin_octaves) {
    const double t_lo = 0.5 / std::sqrt(op.lambda_max());
    const double t_hi = 2.0 / std::sqrt(op.lambda_min_positive());
    const double factor = std::pow(2.0, margin_octaves);
    return for_window(t_lo / factor, t_hi * factor, per_octave);
}

std::pair<int, int> ScaleGrid::octave_span(int nu) const {
    if (nu < nu_coarse_ || nu > nu_fine_) return {0, 0};
    const int block = nu_fine_ - nu; // octaves stored fine..coarse? stored fine->coarse order
    const int begin = block * per_octave_;
    return {begin, begin + per_octave_};
}

Vec apply_spectral(const SelfAdjointOperator& op, const SpectralProfile& p, double t,
                   const Vec& f) {
    if (!(t > 0.0)) throw std::invalid_argument("apply_spectral: need t > 0");
    return op.spectral_apply([&](double l) { return p(t * std::sqrt(l)); }, f);
}

Vec CoeffField::at(const SpectralProfile& p, double t) const {
    Vec c = coeff_;
    const auto& lam = op_->eigenvalues();
    for (std::size_t k = 0; k < c.size(); ++k) c[k] *= p(t * std::sqrt(lam[k]));
    return op_->synthesize(c);
}

Vec CoeffField::at_multiplier(const std::function<double(double)>& m) const {
    Vec c = coeff_;
    const auto& lam = op_->eigenvalues();
    for (std::size_t k = 0; k < c.size(); ++k) c[k] *= m(lam[k]);
    return op_->synthesize(c);
}

Mat spectral_kernel_at(const SelfAdjointOperator& op, const SpectralProfile& p, double t) {
    return op.spectral_kernel([&](double l) { return p(t * std::sqrt(l)); });
}

KernelBoundResult kernel_bound_check(const SelfAdjointOperator& op, const SpectralProfile& f1,
                                     const SpectralProfile& f2, double t, double s,
                                     double n_decay, int ell) {
    if (ell > 0 && s > t)
        throw std::invalid_argument("kernel_bound_check: smallness gain needs s <= t");
    if (ell > 0 && f2.vanish_order < ell)
        throw std::invalid_argument("kernel_bound_check: second profile lacks vanishing order");

    const Mat k = op.spectral_kernel(
        [&](double l) { return f1(t * std::sqrt(l)) * f2(s * std::sqrt(l)); });
    const auto& sp = op.space();
    const int n = static_cast<int>(sp.size());

    Vec vol(static_cast<std::size_t>(n));
    for (int x = 0; x < n; ++x) vol[static_cast<std::size_t>(x)] = sp.volume(x, t);

    KernelBoundResult res;
    const double gain = (ell > 0) ? std::pow(t / s, 2.0 * ell) : 1.0;
    for (int x = 0; x < n; ++x)
        for (int y = 0; y < n; ++y) {
            const double kv = std::abs(k(static_cast<std::size_t>(x), static_cast<std::size_t>(y)));
            res.max_abs = std::max(res.max_abs, kv);
            if (kv == 0.0) continue;
            const double vmax =
                std::max(vol[static_cast<std::size_t>(x)], vol[static_cast<std::size_t>(y)]);
            const double decay = std::pow(1.0 + sp.d(x, y) / t, n_decay);
            res.c_emp = std::max(res.c_emp, kv * vmax * decay * gain);
        }
    return res;
}

Reconstruction calderon_reconstruct(const SelfAdjointOperator& op, const PartitionOfUnity& pou,
                                    const ScaleGrid& grid, const Vec& f) {
    const double fn = norm2(f);
    Reconstruction rec;
    if (fn == 0.0) {
        rec.f_hat.assign(f.size(), 0.0);
        rec.residual = 0.0;
        return rec;
    }
    // One pass over eigenvalues: factor(lambda) = c_psi sum_k w_k psi(t_k sqrt lambda).
    Vec c = op.coefficients(f);
    const auto& lam = op.eigenvalues();
    for (std::size_t k = 0; k < c.size(); ++k) {
        const double xi = std::sqrt(lam[k]);
        double acc = 0.0;
        for (std::size_t i = 0; i < grid.t().size(); ++i)
            acc += grid.w()[i] * pou(grid.t()[i] * xi);
        c[k] *= pou.c_psi * acc;
    }
    rec.f_hat = op.synthesize(c);

    const Vec target = op.project_off_kernel(f);
    Vec diff(f.size());
    for (std::size_t i = 0; i < f.size(); ++i) diff[i] = rec.f_hat[i] - target[i];
    rec.residual = norm2(diff) / fn;
    return rec;
}

Reconstruction dyadic_reconstruct(const SelfAdjointOperator& op, const PartitionOfUnity& pou,
                                  const Vec& f) {
    const double fn = norm2(f);
    Reconstruction rec;
    if (fn == 0.0) {
        rec.f_hat.assign(f.size(), 0.0);
        rec.residual = 0.0;
        return rec;
    }
    const LevelRange lr = level_range(op);
    Vec c = op.coefficients(f);
    const auto& lam = op.eigenvalues();
    for (std::size_t k = 0; k < c.size(); ++k) {
        const double xi = std::sqrt(lam[k]);
        double acc = 0.0;
        for (int j = lr.j_min; j <= lr.j_max; ++j) acc += pou.at_level(j, xi);
        c[k] *= acc;
    }
    rec.f_hat = op.synthesize(c);
    const Vec target = op.project_off_kernel(f);
    Vec diff(f.size());
    for (std::size_t i = 0; i < f.size(); ++i) diff[i] = rec.f_hat[i] - target[i];
    rec.residual = norm2(diff) / fn;
    return rec;
}

Vec peetre_maximal_of_field(const MetricMeasureSpace& s, const Vec& g, double t,
                            double lambda_exp) {
    const int n = static_cast<int>(s.size());
    Vec out(static_cast<std::size_t>(n), 0.0);
    for (int x = 0; x < n; ++x) {
        double best = 0.0;
        for (int y = 0; y < n; ++y) {
            const double v =
                std::abs(g[static_cast<std::size_t>(y)]) /
                std::pow(1.0 + s.d(x, y) / t, lambda_exp);
            best = std::max(best, v);
        }
        out[static_cast<std::size_t>(x)] = best;
    }
    return out;
}

Vec peetre_maximal(const SelfAdjointOperator& op, const SpectralProfile& p, double t,
                   double lambda_exp, const Vec& f) {
    if (!(lambda_exp > 0.0)) throw std::invalid_argument("peetre_maximal: need lambda > 0");
    const Vec g = apply_spectral(op, p, t, f);
    return peetre_maximal_of_field(op.space(), g, t, lambda_exp);
}

HeadTailSystem make_head_tail_system(const PartitionOfUnity& pou) {
    HeadTailSystem sys;
    const auto psi = pou.psi.eval;

    sys.head.eval = [psi](double u) -> double {
        if (!(u > 0.0)) return 1.0;
        if (u > 2.0) return 0.0;
        double acc = 0.0;
        for (double v = u; v <= 2.0 + 1e-300; v *= 2.0) acc += psi(v);
        return acc;
    };
    sys.head.compact_support = true;
    sys.head.support_lo = 0.0;
    sys.head.support_hi = 2.0;
    sys.head.name = "head";

    sys.phi.eval = [](double u) { return std::exp(-u * u); };
    sys.phi.compact_support = false;
    sys.phi.name = "gauss";

    sys.eta.eval = [psi](double u) -> double {
        const double v = psi(u);
        return v == 0.0 ? 0.0 : v * std::exp(u * u);
    };
    sys.eta.compact_support = true;
    sys.eta.support_lo = pou.psi.support_lo;
    sys.eta.support_hi = pou.psi.support_hi;
    sys.eta.name = "eta";
    return sys;
}

double profile_log_integral(const SpectralProfile& p, const SpectralProfile* q, int points,
                            double lo, double hi) {
    if (p.compact_support) {
        lo = std::max(lo, p.support_lo);
        hi = std::min(hi, p.support_hi);
    }
    if (q && q->compact_support) {
        lo = std::max(lo, q->support_lo);
        hi = std::min(hi, q->support_hi);
    }
    const double llo = std::log(lo), lhi = std::log(hi);
    const double dl = (lhi - llo) / points;
    double acc = 0.0;
    for (int i = 0; i < points; ++i) {
        const double xi = std::exp(llo + (i + 0.5) * dl);
        double v = p(xi);
        if (q) v *= (*q)(xi);
        acc += v * dl;
    }
    return acc;
}

} // namespace fsl
