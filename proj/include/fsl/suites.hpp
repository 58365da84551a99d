#ifndef FSL_SUITES_HPP
#define FSL_SUITES_HPP

#include <functional>
#include <string>
#include <vector>

#include "fsl/atoms.hpp"
#include "fsl/equivalence.hpp"

namespace fsl {

/// Baseline gate: record-or-compare an empirical band under a key; returns
/// pass and may append an explanation.
using GateFn = std::function<bool(const std::string& key, double lo, double hi, std::string* why)>;

inline GateFn accept_all_gate() {
    return [](const std::string&, double, double, std::string*) { return true; };
}

struct SuiteOutcome {
    bool pass = true;
    std::string detail;
    std::vector<EquivalenceReport> reports;
};

/// Space invariants: quasi-distance axioms, exhaustive doubling with the
/// reported constant, cube partition/nesting/sandwich.
SuiteOutcome suite_space_sanity(const MetricMeasureSpace& s, const SelfAdjointOperator& op);

/// Continuous and dyadic reproducing formulas over seeded random fields.
SuiteOutcome suite_calderon(const SelfAdjointOperator& op, int samples, std::uint64_t seed,
                            int band_lo, int band_hi, int per_octave);

/// Decay-bound constants: per-scale s-families stable within x4, global
/// stability asserted when the interior window spans two octaves.
SuiteOutcome suite_kernel_bounds(const SelfAdjointOperator& op, double n_exp, const GateFn& gate);

struct AtomsSuiteParams {
    int M = 2;
    int samples = 10;
    std::uint64_t seed = 7;
    int band_lo = 1;
    int band_hi = 8;
    int per_octave = 32;
    double alpha = 0.0;
    double p = 2.0;
    double q = 2.0;
    double eps_supp = 1e-8;
    double phi_half_width = 1.0 / 2048.0;
};

/// Constructive decomposition end to end: reconstruction residual, atom
/// verification, coefficient-norm bounds, synthesis direction + refusal.
SuiteOutcome suite_atoms(const SelfAdjointOperator& op, const Weight& w,
                         const AtomsSuiteParams& params, double n_exp, double q_w,
                         const GateFn& gate);

/// Fractional-power and multiplier identities plus boundedness bands.
SuiteOutcome suite_apps(const SuiteContext& ctx, const GateFn& gate);

/// A_p exactness/monotonicity/duality and Fefferman-Stein stability.
SuiteOutcome suite_weights(const MetricMeasureSpace& s, const Weight& power_like,
                           const GateFn& gate);

} // namespace fsl

#endif
