#ifndef FSL_WEIGHTS_HPP
#define FSL_WEIGHTS_HPP

#include <optional>
#include <string>
#include <vector>

#include "fsl/space.hpp"

namespace fsl {

/// Positive weight density on the space. w(E) = sum_{x in E} w(x) mu(x).
struct Weight {
    Vec w;
    std::string descriptor = "explicit";

    double operator[](int x) const { return w[static_cast<std::size_t>(x)]; }
    double set_mass(const MetricMeasureSpace& s, const std::vector<int>& members) const;
};

Weight constant_weight(const MetricMeasureSpace& s, double value = 1.0);
/// w(x) = (offset + d(x, center))^exponent with offset = min positive distance.
Weight power_weight(const MetricMeasureSpace& s, int center, double exponent);

/// Muckenhoupt characteristic over the exhaustive distinct-ball sweep.
/// p = 1 uses the sup_B (avg_B w) / min_B w form.
double ap_constant(const MetricMeasureSpace& s, const Weight& w, double p);

/// Reverse Holder constant sup_B (avg_B w^q)^{1/q} / avg_B w, q > 1.
double rh_constant(const MetricMeasureSpace& s, const Weight& w, double q);

struct ApReport {
    double qw_est = 1.0;
    double rw_est = 1.0;
    double ap_threshold = 0.0;              ///< membership surrogate used by the bisection
    std::vector<std::pair<double, double>> ap_curve; ///< (p, [w]_{A_p}) samples
    std::vector<std::pair<double, double>> rh_curve; ///< (q, RH_q constant)
};

/// Critical indices via bisection against a finite-constant threshold; on a
/// finite space every weight is in every class, so the threshold is part of
/// the report and the full curve is stored for auditing.
ApReport critical_indices(const MetricMeasureSpace& s, const Weight& w,
                          double threshold = 1e3, double tol = 1e-3);

/// (sum |f|^p w mu)^{1/p}; p = infinity returns max|f|.
double weighted_lp_norm(const MetricMeasureSpace& s, const Vec& f, double p, const Weight& w);

/// Weighted Hardy-Littlewood maximal function M_{r,w} f, exact over all
/// balls containing each point. Unweighted when w is not given.
Vec maximal_function(const MetricMeasureSpace& s, const Vec& f, double r,
                     const std::optional<Weight>& w = std::nullopt);

/// Empirical Fefferman-Stein constant
///   || (sum_nu (M_r f_nu)^q)^{1/q} ||_{p,w} / || (sum_nu |f_nu|^q)^{1/q} ||_{p,w}.
/// Throws on an all-zero family.
double fefferman_stein_check(const MetricMeasureSpace& s, const std::vector<Vec>& family,
                             double p, double q, double r, const Weight& w);

} // namespace fsl

#endif
