#ifndef FSL_APPS_HPP
#define FSL_APPS_HPP

#include <functional>
#include <string>

#include "fsl/calculus.hpp"
#include "fsl/operator.hpp"

namespace fsl {

/// L^{s/2} f. Evaluated spectrally (lambda^{s/2} on coefficients); the
/// heat-semigroup integral representation
///   Gamma(m - s/2)^{-1} int_0^inf t^{-s/2} (tL)^m e^{-tL} f dt/t
/// is quadratured as an independent route and must agree to `check_tol`
/// relative, else the call throws. s <= 0 requires f orthogonal to ker L.
Vec fractional_power(const SelfAdjointOperator& op, const Vec& f, double s, int m_order = 0,
                     double check_tol = 1e-4);

/// The scalar factor of the integral route at one eigenvalue; exposed for
/// the oracle tests. m_order = 0 picks the smallest admissible order.
double fractional_power_integral_factor(double lambda, double s, int m_order, double lambda_max,
                                        double lambda_min_pos, int per_octave = 32);

/// Bounded symbol m on [0, infinity); the multiplier acts as
///   m~(L) = int_0^inf t L e^{-t^2 L} m(t^2) dt.
struct MultiplierProfile {
    std::function<double(double)> m;
    double bound = 0.0; ///< sup |m|
    std::string name = "symbol";
};

MultiplierProfile constant_symbol(double value);
MultiplierProfile exp_symbol(double a); ///< m(u) = exp(-a u)
MultiplierProfile table_symbol(const std::vector<double>& u, const std::vector<double>& m);

/// m~(L) f with the scalar integral quadratured per eigenvalue
/// (substitution u = t^2 lambda). Kernel eigenvalues contribute zero.
Vec laplace_type_multiplier(const SelfAdjointOperator& op, const MultiplierProfile& sym,
                            const Vec& f);

/// Scalar m~(lambda) for one eigenvalue; oracle-facing.
double laplace_multiplier_factor(double lambda, const MultiplierProfile& sym,
                                 int per_octave = 32);

} // namespace fsl

#endif
