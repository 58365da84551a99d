#ifndef FSL_CALCULUS_HPP
#define FSL_CALCULUS_HPP

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "fsl/operator.hpp"

namespace fsl {

/// Scalar profile F on [0, infinity) fed to the functional calculus as
/// F(t sqrt(L)). vanish_order m means F(xi) = xi^{2m} * (bounded near 0).
struct SpectralProfile {
    std::function<double(double)> eval;
    bool compact_support = false;
    double support_lo = 0.0;
    double support_hi = 0.0;
    int vanish_order = 0;
    std::string name = "profile";

    double operator()(double xi) const { return eval(xi); }
};

/// (t^2 L)^m e^{-t^2 L} as a profile in xi = t sqrt(lambda).
SpectralProfile heat_profile(int m);
/// xi^{2m} * base(xi) profiles for the non-compact characterizations.
SpectralProfile sm_profile(int m);

/// Smooth partition of unity: supp psi in [1/2, 2], sum_j psi(2^{-j} x) = 1
/// on (0, infinity). `shape` picks among bump shapes so two genuinely
/// different partitions are available.
struct PartitionOfUnity {
    SpectralProfile psi;
    double c_psi = 0.0;   ///< [ integral psi(x) dx/x ]^{-1}
    double shape = 1.0;

    double operator()(double xi) const { return psi(xi); }
    /// psi_j(lambda) = psi(2^{-j} lambda) evaluated at sqrt-eigenvalue xi.
    double at_level(int j, double xi) const { return psi(std::pow(2.0, -j) * xi); }
};

PartitionOfUnity make_partition_of_unity(double shape = 1.0);

/// Fourier transform of an even C_c^infinity bump phi >= 0 with
/// supp phi in (-half_width, half_width) and integral 2 pi, normalized so
/// Phi(0) = 1. Kernels of (t^2 L)^k Phi(t sqrt L) then concentrate within
/// d <= half_width * t up to spectrally small tails.
SpectralProfile make_compact_phi(double half_width = 0.25);

/// Dyadic level range covering the positive spectrum:
/// j with 2^{-j} sqrt(lambda) in (1/2, 2) for some positive eigenvalue.
struct LevelRange {
    int j_min = 0;
    int j_max = 0;
};
LevelRange level_range(const SelfAdjointOperator& op, int margin = 1);

/// Log-uniform grid discretizing every integral dt/t. Octave nu holds the
/// points in (2^{-nu-1}, 2^{-nu}]; K points per octave at log midpoints, so
/// the octave buckets tile the grid exactly and sum_k w_k = log(t_max/t_min).
class ScaleGrid {
public:
    static ScaleGrid for_operator(const SelfAdjointOperator& op, int per_octave = 16,
                                  int margin_octaves = 0);
    static ScaleGrid for_window(double t_lo, double t_hi, int per_octave);

    const std::vector<double>& t() const { return t_; }
    const std::vector<double>& w() const { return w_; }
    int per_octave() const { return per_octave_; }
    int nu_coarse() const { return nu_coarse_; } ///< coarsest octave index
    int nu_fine() const { return nu_fine_; }     ///< finest octave index
    double t_min() const { return t_.front(); }
    double t_max() const { return t_.back(); }

    /// Index span [begin, end) of the points in octave nu.
    std::pair<int, int> octave_span(int nu) const;

private:
    std::vector<double> t_, w_;
    int per_octave_ = 0;
    int nu_coarse_ = 0, nu_fine_ = 0;
};

/// F(t sqrt L) f through the eigendecomposition.
Vec apply_spectral(const SelfAdjointOperator& op, const SpectralProfile& f_profile, double t,
                   const Vec& f);
Mat spectral_kernel_at(const SelfAdjointOperator& op, const SpectralProfile& p, double t);

/// mu-spectral coefficients of a fixed field, cached so a scale sweep costs
/// one synthesis per scale instead of two dense products.
class CoeffField {
public:
    CoeffField(const SelfAdjointOperator& op, const Vec& f)
        : op_(&op), coeff_(op.coefficients(f)) {}

    const SelfAdjointOperator& op() const { return *op_; }
    const Vec& coeff() const { return coeff_; }
    /// F(t sqrt L) f.
    Vec at(const SpectralProfile& p, double t) const;
    /// Scalar multiplier m(lambda) applied to the coefficients.
    Vec at_multiplier(const std::function<double(double)>& m) const;

private:
    const SelfAdjointOperator* op_;
    Vec coeff_;
};

struct KernelBoundResult {
    double c_emp = 0.0;     ///< max |K| V(x or y, t) (1+d/t)^N (t/s)^{2 ell}
    double max_abs = 0.0;   ///< plain max |K|
};

/// Empirical constant for the decay bounds on K_{F1(t sqrt L) F2(s sqrt L)}.
/// ell > 0 engages the (s/t)^{2 ell} smallness gain (requires s <= t and
/// vanish_order(F2) >= ell).
KernelBoundResult kernel_bound_check(const SelfAdjointOperator& op, const SpectralProfile& f1,
                                     const SpectralProfile& f2, double t, double s,
                                     double n_decay, int ell);

struct Reconstruction {
    Vec f_hat;
    double residual = 0.0; ///< ||f_hat - P+ f||_2 / ||f||_2 (0 for f = 0)
};

/// c_psi * sum_k w_k psi(t_k sqrt L) f  (continuous Calderon formula).
Reconstruction calderon_reconstruct(const SelfAdjointOperator& op, const PartitionOfUnity& pou,
                                    const ScaleGrid& grid, const Vec& f);
/// sum_j psi_j(sqrt L) f (dyadic Calderon formula; exact on the spectrum).
Reconstruction dyadic_reconstruct(const SelfAdjointOperator& op, const PartitionOfUnity& pou,
                                  const Vec& f);

/// Peetre maximal function: sup_y |F(t sqrt L) f(y)| / (1 + d(x,y)/t)^lambda.
Vec peetre_maximal(const SelfAdjointOperator& op, const SpectralProfile& p, double t,
                   double lambda_exp, const Vec& f);
/// Same, applied to a precomputed field g = F(t sqrt L) f.
Vec peetre_maximal_of_field(const MetricMeasureSpace& s, const Vec& g, double t,
                            double lambda_exp);

/// Numeric integral of p(x) q(x) dx/x over a log grid (q may be null).
double profile_log_integral(const SpectralProfile& p, const SpectralProfile* q = nullptr,
                            int points = 1 << 15, double lo = 1e-8, double hi = 1e4);

/// Classical head-plus-band system behind the localized reproducing
/// identity: head(u) + sum_{k >= 1} phi(2^{-k} u) eta(2^{-k} u) = 1 on
/// (0, infinity), with head(0) = 1, supp head in [0, 2], phi even and
/// nonzero on the band, supp eta in [1/2, 2]. The head is the cumulative
/// sum of the partition dilates at and below unit scale.
struct HeadTailSystem {
    SpectralProfile head;
    SpectralProfile phi;
    SpectralProfile eta;
};
HeadTailSystem make_head_tail_system(const PartitionOfUnity& pou);

} // namespace fsl

#endif
