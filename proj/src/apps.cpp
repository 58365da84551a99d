#include "fsl/apps.hpp"

#include <algorithm>
#include <cmath>

namespace fsl {

namespace {

/// Fixed t-window for the heat integral, wide enough that the truncated
/// tails at u = t lambda stay below ~1e-10 relative for every eigenvalue:
/// near zero the integrand behaves like u^{m - s/2}, so the lower cut is
/// tolerance-driven rather than a fixed decade count.
std::pair<double, double> heat_window(double s, int m, double lambda_max, double lambda_min_pos) {
    const double a = m - 0.5 * s; // positive by admissibility
    const double tail_tol = 1e-12;
    double u_lo = std::pow(tail_tol * a * std::tgamma(a), 1.0 / a);
    u_lo = std::min(u_lo, 1e-3);
    const double u_hi = 80.0;
    return {u_lo / lambda_max, u_hi / lambda_min_pos};
}

} // namespace

double fractional_power_integral_factor(double lambda, double s, int m_order, double lambda_max,
                                        double lambda_min_pos, int per_octave) {
    if (lambda <= 0.0) return 0.0;
    const int m = m_order;
    const auto [t_lo, t_hi] = heat_window(s, m, lambda_max, lambda_min_pos);
    const double llo = std::log(t_lo), lhi = std::log(t_hi);
    const int n = std::max(16, static_cast<int>(std::ceil((lhi - llo) / std::log(2.0))) * per_octave);
    const double dl = (lhi - llo) / n;
    double acc = 0.0;
    for (int i = 0; i < n; ++i) {
        const double t = std::exp(llo + (i + 0.5) * dl);
        const double u = t * lambda;
        acc += std::pow(t, -0.5 * s) * std::pow(u, m) * std::exp(-u) * dl;
    }
    return acc / std::tgamma(m - 0.5 * s);
}

Vec fractional_power(const SelfAdjointOperator& op, const Vec& f, double s, int m_order,
                     double check_tol) {
    int m = m_order;
    if (m == 0) m = static_cast<int>(std::floor(0.5 * s)) + 1;
    if (!(m > 0.5 * s)) throw std::invalid_argument("fractional_power: need m_order > s/2");

    Vec c = op.coefficients(f);
    if (s <= 0.0) {
        double kernel_mass = 0.0, total = 0.0;
        for (int k = 0; k < op.kernel_dim(); ++k)
            kernel_mass += c[static_cast<std::size_t>(k)] * c[static_cast<std::size_t>(k)];
        for (double v : c) total += v * v;
        if (total > 0.0 && std::sqrt(kernel_mass / total) > 1e-10)
            throw std::invalid_argument("fractional_power: s <= 0 needs f orthogonal to ker L");
    }

    const double lmax = op.lambda_max();
    const double lmin = op.lambda_min_positive();
    double worst = 0.0;
    Vec out_c(c.size(), 0.0);
    for (std::size_t k = 0; k < c.size(); ++k) {
        const double lam = op.eigenvalues()[k];
        if (lam <= 0.0) continue; // kernel: zero for s > 0, excluded for s <= 0
        const double spectral = std::pow(lam, 0.5 * s);
        out_c[k] = spectral * c[k];
        if (c[k] != 0.0) {
            const double integral = fractional_power_integral_factor(lam, s, m, lmax, lmin);
            worst = std::max(worst, std::abs(integral - spectral) / spectral);
        }
    }
    if (worst > check_tol)
        throw std::runtime_error("fractional_power: integral route disagrees (grid too coarse?)");
    return op.synthesize(out_c);
}

MultiplierProfile constant_symbol(double value) {
    return {[value](double) { return value; }, std::abs(value), "constant"};
}

MultiplierProfile exp_symbol(double a) {
    if (a < 0.0) throw std::invalid_argument("exp_symbol: need a >= 0");
    return {[a](double u) { return std::exp(-a * u); }, 1.0, "exp"};
}

MultiplierProfile table_symbol(const std::vector<double>& u, const std::vector<double>& m) {
    if (u.size() != m.size() || u.size() < 2)
        throw std::invalid_argument("table_symbol: need matching u/m tables, size >= 2");
    double bound = 0.0;
    for (double v : m) bound = std::max(bound, std::abs(v));
    auto eval = [u, m](double x) {
        if (x <= u.front()) return m.front();
        if (x >= u.back()) return m.back();
        const auto it = std::upper_bound(u.begin(), u.end(), x);
        const std::size_t i = static_cast<std::size_t>(it - u.begin());
        const double s = (x - u[i - 1]) / (u[i] - u[i - 1]);
        return (1.0 - s) * m[i - 1] + s * m[i];
    };
    return {eval, bound, "table"};
}

double laplace_multiplier_factor(double lambda, const MultiplierProfile& sym, int per_octave) {
    if (lambda <= 0.0) return 0.0;
    // int_0^inf t lambda e^{-t^2 lambda} m(t^2) dt = (1/2) int_0^inf e^{-u} m(u/lambda) du
    const double u_lo = 1e-12, u_hi = 80.0;
    const double llo = std::log(u_lo), lhi = std::log(u_hi);
    const int n = static_cast<int>(std::ceil((lhi - llo) / std::log(2.0))) * per_octave;
    const double dl = (lhi - llo) / n;
    double acc = 0.0;
    for (int i = 0; i < n; ++i) {
        const double u = std::exp(llo + (i + 0.5) * dl);
        acc += u * std::exp(-u) * sym.m(u / lambda) * dl; // du = u dlog u
    }
    // left tail below u_lo contributes <= sup|m| * u_lo
    return 0.5 * acc;
}

Vec laplace_type_multiplier(const SelfAdjointOperator& op, const MultiplierProfile& sym,
                            const Vec& f) {
    Vec c = op.coefficients(f);
    for (std::size_t k = 0; k < c.size(); ++k)
        c[k] *= laplace_multiplier_factor(op.eigenvalues()[k], sym);
    return op.synthesize(c);
}

} // namespace fsl
