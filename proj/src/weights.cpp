#include "fsl/weights.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace fsl {

double Weight::set_mass(const MetricMeasureSpace& s, const std::vector<int>& members) const {
    double m = 0.0;
    for (int x : members) m += w[static_cast<std::size_t>(x)] * s.mu(x);
    return m;
}

Weight constant_weight(const MetricMeasureSpace& s, double value) {
    if (!(value > 0.0)) throw std::invalid_argument("constant_weight: value must be positive");
    return {Vec(s.size(), value), "constant"};
}

Weight power_weight(const MetricMeasureSpace& s, int center, double exponent) {
    const double offset = s.min_positive_distance() > 0.0 ? s.min_positive_distance() : 1.0;
    Vec w(s.size());
    for (std::size_t x = 0; x < s.size(); ++x)
        w[x] = std::pow(offset + s.d(center, static_cast<int>(x)), exponent);
    return {std::move(w), "power(c=" + std::to_string(center) + ",a=" + std::to_string(exponent) + ")"};
}

namespace {

/// Averages of g against mu over every distinct ball, via per-center prefix sums.
/// visit(ball, avg_of_g1, avg_of_g2).
template <typename F>
void sweep_ball_averages(const MetricMeasureSpace& s, const Vec& g1, const Vec& g2, F&& visit) {
    const int n = static_cast<int>(s.size());
    for (int x = 0; x < n; ++x) {
        const auto& ids = s.sorted_ids(x);
        const auto& d = s.sorted_dists(x);
        const auto& pmu = s.prefix_mu(x);
        double s1 = 0.0, s2 = 0.0;
        for (int k = 1; k <= n; ++k) {
            const auto id = static_cast<std::size_t>(ids[k - 1]);
            s1 += g1[id] * s.mu(static_cast<int>(id));
            s2 += g2[id] * s.mu(static_cast<int>(id));
            if (k < n && d[static_cast<std::size_t>(k)] == d[static_cast<std::size_t>(k - 1)])
                continue;
            const double vol = pmu[static_cast<std::size_t>(k)];
            visit(x, k, s1 / vol, s2 / vol);
        }
    }
}

} // namespace

double ap_constant(const MetricMeasureSpace& s, const Weight& w, double p) {
    if (!(p >= 1.0)) throw std::invalid_argument("ap_constant: need p >= 1");

    if (p == 1.0) {
        double best = 0.0;
        Vec ones(s.size(), 1.0);
        sweep_ball_averages(s, w.w, ones, [&](int x, int k, double avg_w, double) {
            double wmin = std::numeric_limits<double>::infinity();
            const auto& ids = s.sorted_ids(x);
            for (int i = 0; i < k; ++i)
                wmin = std::min(wmin, w.w[static_cast<std::size_t>(ids[static_cast<std::size_t>(i)])]);
            best = std::max(best, avg_w / wmin);
        });
        return best;
    }

    Vec wdual(s.size());
    for (std::size_t i = 0; i < s.size(); ++i) wdual[i] = std::pow(w.w[i], -1.0 / (p - 1.0));
    double best = 0.0;
    sweep_ball_averages(s, w.w, wdual, [&](int, int, double avg_w, double avg_dual) {
        best = std::max(best,
                        std::pow(avg_w, 1.0 / p) * std::pow(avg_dual, (p - 1.0) / p));
    });
    return best;
}

double rh_constant(const MetricMeasureSpace& s, const Weight& w, double q) {
    if (!(q > 1.0)) throw std::invalid_argument("rh_constant: need q > 1");
    Vec wq(s.size());
    for (std::size_t i = 0; i < s.size(); ++i) wq[i] = std::pow(w.w[i], q);
    double best = 0.0;
    sweep_ball_averages(s, wq, w.w, [&](int, int, double avg_wq, double avg_w) {
        best = std::max(best, std::pow(avg_wq, 1.0 / q) / avg_w);
    });
    return best;
}

ApReport critical_indices(const MetricMeasureSpace& s, const Weight& w,
                          double threshold, double tol) {
    ApReport rep;
    rep.ap_threshold = threshold;

    for (double p : {1.0, 1.25, 1.5, 2.0, 3.0, 4.0, 8.0})
        rep.ap_curve.push_back({p, ap_constant(s, w, p)});
    for (double q : {1.25, 1.5, 2.0, 3.0, 4.0})
        rep.rh_curve.push_back({q, rh_constant(s, w, q)});

    // q_w: smallest p with [w]_{A_p} below the threshold.
    {
        double lo = 1.0, hi = 1.0;
        if (ap_constant(s, w, lo) <= threshold) {
            rep.qw_est = 1.0;
        } else {
            hi = 2.0;
            while (ap_constant(s, w, hi) > threshold && hi < 1e3) hi *= 2.0;
            while (hi - lo > tol) {
                const double mid = 0.5 * (lo + hi);
                (ap_constant(s, w, mid) <= threshold ? hi : lo) = mid;
            }
            rep.qw_est = hi;
        }
    }
    // r_w: largest q with RH_q constant below the threshold (capped search).
    {
        double lo = 1.0 + tol, hi = 1.0 + tol;
        if (rh_constant(s, w, lo) > threshold) {
            rep.rw_est = 1.0;
        } else {
            hi = 2.0;
            while (rh_constant(s, w, hi) <= threshold && hi < 64.0) hi *= 2.0;
            if (hi >= 64.0) {
                rep.rw_est = hi;
            } else {
                while (hi - lo > tol) {
                    const double mid = 0.5 * (lo + hi);
                    (rh_constant(s, w, mid) <= threshold ? lo : hi) = mid;
                }
                rep.rw_est = lo;
            }
        }
    }
    return rep;
}

double weighted_lp_norm(const MetricMeasureSpace& s, const Vec& f, double p, const Weight& w) {
    if (f.size() != s.size()) throw std::invalid_argument("weighted_lp_norm: size mismatch");
    if (std::isinf(p)) {
        double m = 0.0;
        for (double v : f) m = std::max(m, std::abs(v));
        return m;
    }
    if (!(p > 0.0)) throw std::invalid_argument("weighted_lp_norm: need p > 0");
    double sum = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i)
        sum += std::pow(std::abs(f[i]), p) * w.w[i] * s.mu(static_cast<int>(i));
    return std::pow(sum, 1.0 / p);
}

Vec maximal_function(const MetricMeasureSpace& s, const Vec& f, double r,
                     const std::optional<Weight>& w) {
    if (!(r > 0.0)) throw std::invalid_argument("maximal_function: need r > 0");
    const int n = static_cast<int>(s.size());
    Vec out(s.size(), 0.0);

    // For each center: averages over all its distinct balls, then a suffix
    // max so that "best ball around this center containing x" is O(1).
    for (int c = 0; c < n; ++c) {
        const auto& ids = s.sorted_ids(c);
        const auto& d = s.sorted_dists(c);
        // averages only at prefix lengths that realize a ball (cuts at
        // strict distance jumps); mid-tie prefixes are not balls
        std::vector<double> avg(static_cast<std::size_t>(n) + 1, 0.0);
        double num = 0.0, den = 0.0;
        for (int k = 1; k <= n; ++k) {
            const auto id = static_cast<std::size_t>(ids[k - 1]);
            const double wk = w ? w->w[id] : 1.0;
            num += std::pow(std::abs(f[id]), r) * wk * s.mu(static_cast<int>(id));
            den += wk * s.mu(static_cast<int>(id));
            const bool valid_cut =
                (k == n) || d[static_cast<std::size_t>(k)] > d[static_cast<std::size_t>(k - 1)];
            if (valid_cut) avg[static_cast<std::size_t>(k)] = num / den;
        }
        // suffix max over prefix lengths k..n
        std::vector<double> suf(static_cast<std::size_t>(n) + 2, 0.0);
        for (int k = n; k >= 1; --k)
            suf[static_cast<std::size_t>(k)] =
                std::max(avg[static_cast<std::size_t>(k)], suf[static_cast<std::size_t>(k) + 1]);
        // x sits in every ball B(c, rad) with rad > d(c,x): prefix lengths
        // from x's position (in the sorted order, counting distance ties) on.
        for (int pos = 0; pos < n; ++pos) {
            const auto x = static_cast<std::size_t>(ids[static_cast<std::size_t>(pos)]);
            // smallest prefix that surely contains x: skip forward over ties
            int k = pos + 1;
            while (k < n && d[static_cast<std::size_t>(k)] == d[static_cast<std::size_t>(pos)]) ++k;
            out[x] = std::max(out[x], suf[static_cast<std::size_t>(k)]);
        }
    }
    for (double& v : out) v = std::pow(v, 1.0 / r);
    return out;
}

double fefferman_stein_check(const MetricMeasureSpace& s, const std::vector<Vec>& family,
                             double p, double q, double r, const Weight& w) {
    if (family.empty()) throw std::invalid_argument("fefferman_stein_check: empty family");
    if (!(r > 0.0) || !(r < std::min(p, q)))
        throw std::invalid_argument("fefferman_stein_check: need 0 < r < min(p,q)");

    Vec lhs(s.size(), 0.0), rhs(s.size(), 0.0);
    for (const auto& f : family) {
        const Vec mf = maximal_function(s, f, r);
        for (std::size_t i = 0; i < s.size(); ++i) {
            lhs[i] += std::pow(mf[i], q);
            rhs[i] += std::pow(std::abs(f[i]), q);
        }
    }
    for (std::size_t i = 0; i < s.size(); ++i) {
        lhs[i] = std::pow(lhs[i], 1.0 / q);
        rhs[i] = std::pow(rhs[i], 1.0 / q);
    }
    const double den = weighted_lp_norm(s, rhs, p, w);
    if (den == 0.0) throw std::invalid_argument("fefferman_stein_check: all-zero family");
    return weighted_lp_norm(s, lhs, p, w) / den;
}

} // namespace fsl
