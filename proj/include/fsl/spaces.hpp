#ifndef FSL_SPACES_HPP
#define FSL_SPACES_HPP

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "fsl/calculus.hpp"
#include "fsl/weights.hpp"

namespace fsl {

enum class NormFlavor { Dyadic, Continuous, Peetre, GFunction, Lusin };

NormFlavor norm_flavor_from_string(const std::string& s);
std::string to_string(NormFlavor f);

/// Parameter bundle for the Besov / Triebel-Lizorkin functionals.
/// When `profile` is unset the partition of unity is used. The grid is
/// required by the continuous-type flavors; dyadic flavors use `levels`.
struct NormParams {
    double alpha = 0.0;
    double p = 2.0;
    double q = 2.0;
    const Weight* weight = nullptr;
    const PartitionOfUnity* pou = nullptr;
    const SpectralProfile* profile = nullptr;
    const ScaleGrid* grid = nullptr;
    LevelRange levels;
    double lambda_exp = 0.0; ///< Peetre decay exponent
    double aperture = 1.0;   ///< Lusin cone aperture a >= 1
    NormFlavor flavor = NormFlavor::Dyadic;

    const SpectralProfile& active_profile() const;
    void validate(bool triebel) const;
};

struct NormValue {
    double value = 0.0;
    /// (scale or level, contribution) pairs, flavor-dependent diagnostics.
    std::vector<std::pair<double, double>> per_scale;
};

NormValue besov_norm(const SelfAdjointOperator& op, const Vec& f, const NormParams& params);
NormValue triebel_norm(const SelfAdjointOperator& op, const Vec& f, const NormParams& params);

/// Triebel-Lizorkin scale at p = infinity: Carleson-type ball supremum.
/// Flavors: Dyadic (ball + dyadic tail sum), Continuous (N_{alpha,q,L}),
/// Peetre (N^*_{lambda,alpha,q,L}).
NormValue f_infinity_norm(const SelfAdjointOperator& op, const Vec& f, double alpha, double q,
                          const Weight& w, NormFlavor flavor, const PartitionOfUnity& pou,
                          const ScaleGrid* grid = nullptr, double lambda_exp = 0.0);

/// sup_B w(B)^{-1} int_B |(I - e^{-r_B^2 L}) f| dmu, exhaustive over balls.
double bmo_l_norm(const SelfAdjointOperator& op, const Vec& f, const Weight& w);

/// Classical weighted mean oscillation sup_B w(B)^{-1} int_B |f - f_B| dmu.
/// Informational companion to bmo_l_norm.
double bmo_classical_norm(const MetricMeasureSpace& s, const Vec& f, const Weight& w);

/// || S_L f ||_{p,w} with S_L the aperture-1 Lusin functional of
/// (t^2 L) e^{-t^2 L} f on the given grid.
double hardy_norm(const SelfAdjointOperator& op, const Vec& f, double p, const Weight& w,
                  const ScaleGrid& grid);

/// || L^{s/2} f ||_{p,w}; s < 0 requires f orthogonal to ker L.
double sobolev_norm(const SelfAdjointOperator& op, const Vec& f, double s, double p,
                    const Weight& w);

/// Lusin and Littlewood-Paley functionals of an explicit space-scale field
/// F(y, t_i); exposed for the square-function identities and tests.
Vec lusin_functional(const MetricMeasureSpace& s, const std::vector<Vec>& field,
                     const ScaleGrid& grid, double alpha, double q, double aperture);
Vec g_functional(const MetricMeasureSpace& s, const std::vector<Vec>& field,
                 const ScaleGrid& grid, double alpha, double q, double lambda_exp);

} // namespace fsl

#endif
