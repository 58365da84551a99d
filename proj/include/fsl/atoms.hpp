#ifndef FSL_ATOMS_HPP
#define FSL_ATOMS_HPP

#include <optional>
#include <vector>

#include "fsl/calculus.hpp"
#include "fsl/weights.hpp"

namespace fsl {

/// One (L, M, p, w) atom a = L^M b attached to a dyadic cube. The support
/// ball is 3B_Q = {y : d(x_Q, y) <= 3 kappa0 ell(Q)}; on a discrete space
/// the containment holds up to measured tails (support_eps).
struct Atom {
    int cube_id = -1;
    int level_nu = 0;
    double ell = 0.0;       ///< 2^{-nu}
    int center = 0;         ///< x_Q
    double s_coeff = 0.0;   ///< s_Q
    Vec b;
    Vec a;                  ///< L^M b
    std::vector<int> cube_members;  ///< Q itself (carries chi_Q)
    std::vector<int> support_ball;  ///< members of 3B_Q
    double support_eps = 0.0;  ///< max_k max_{x not in 3B_Q} |L^k b| / max |L^k b|
    double size_const = 0.0;   ///< max_k max|L^k b| / (ell^{2(M-k)} w(Q)^{-1/p})
    double cancel_defect = 0.0;///< |sum a mu| / sum |a| mu
};

struct Decomposition {
    std::vector<Atom> atoms;
    int skipped_cubes = 0;   ///< cubes with s_Q = 0
    double norm_const = 0.0; ///< c = [int psi Phi dxi/xi]^{-1}
    int M = 1;
    double p = 2.0;
    Vec target;              ///< the decomposed field (kernel part removed)
};

struct DecomposeOptions {
    double eps_supp = 1e-8;      ///< acceptance threshold recorded per atom
    bool truncate_to_ball = false; ///< hard-truncate b to 3B_Q (delta folds into residual)
    double min_norm_integral = 1e-3;
};

/// Cube tree whose levels tile the grid's octaves while honoring the
/// coarse/fine scale preconditions of the Christ construction.
DyadicCubeTree tree_covering_grid(const MetricMeasureSpace& s, const ScaleGrid& grid);

/// Constructive decomposition over the cube tree levels that tile the scale
/// grid octaves. Throws when the psi*Phi normalization degenerates or f has
/// a kernel component beyond 1e-10 relative.
Decomposition atomic_decompose(const SelfAdjointOperator& op, const Vec& f, int M, double p,
                               const Weight& w, const PartitionOfUnity& pou,
                               const SpectralProfile& phi, const DyadicCubeTree& tree,
                               const ScaleGrid& grid, const DecomposeOptions& opt = {});

/// f_hat = c sum s_Q a_Q and its relative L2 residual against the target.
Reconstruction reconstruct(const SelfAdjointOperator& op, const Decomposition& dec);

struct CoefficientNorms {
    double besov = 0.0;   ///< [sum_nu 2^{nu alpha q} (sum_Q |s_Q|^p)^{q/p}]^{1/q}
    double triebel = 0.0; ///< || [sum_nu 2^{nu alpha q} (sum_Q w(Q)^{-1/p}|s_Q| chi_Q)^q]^{1/q} ||_{p,w}
};

CoefficientNorms coefficient_norms(const MetricMeasureSpace& s, const Decomposition& dec,
                                   double alpha, double p, double q, const Weight& w);

/// Smallest admissible M for the synthesis direction:
/// M > n/2 + max(alpha, n q_w / (1 ^ p ^ q) - alpha)/2.
double synthesis_m_threshold(double n_exp, double q_w, double alpha, double p, double q);

/// Random admissible decomposition for the converse (synthesis) bound:
/// atoms are smooth bumps on cubes, rescaled so every size bound of the
/// atom definition holds with constant 1. Throws when M is at or below the
/// threshold (the theorem gives no bound there).
Decomposition synthesize_random_decomposition(const SelfAdjointOperator& op,
                                              const DyadicCubeTree& tree, int M, double alpha,
                                              double p, double q, const Weight& w, double n_exp,
                                              double q_w, std::uint64_t seed);

struct ClassicalAtomReport {
    bool ran = false;        ///< prerequisites (H) and (C) available
    double support_eps = 0.0;
    double sup_const = 0.0;    ///< sup|a| * w(Q)^{1/p}
    double holder_const = 0.0; ///< max pair quotient against (d/ell)^{delta0} w(Q)^{-1/p}
    double cancel_defect = 0.0;
};

/// Checks the comparison-section atom conditions on a produced atom, given
/// the fitted Holder exponent delta0 and the conservation defect of the
/// operator. Skips (ran = false) when prerequisites fail.
ClassicalAtomReport classical_atom_check(const SelfAdjointOperator& op, const Atom& atom,
                                         double p, const Weight& w, double delta0,
                                         double conservation_defect);

} // namespace fsl

#endif
