#ifndef FSL_EQUIVALENCE_HPP
#define FSL_EQUIVALENCE_HPP

#include <map>
#include <string>
#include <vector>

#include "fsl/spaces.hpp"

namespace fsl {

/// Ratio statistics of normA/normB over seeded random band-limited fields.
struct EquivalenceReport {
    std::string check;
    std::string key; ///< check + parameter tuple; baseline lookup key
    std::map<std::string, double> params;
    int samples = 0;
    std::uint64_t seed = 0;
    double ratio_min = 0.0;
    double ratio_max = 0.0;
    double ratio_median = 0.0;
    std::map<std::string, double> extra;
    bool gating = true;
    bool pass = true; ///< set by the baseline comparison
};

struct SuiteContext {
    const SelfAdjointOperator* op = nullptr;
    const Weight* weight = nullptr;
    std::string weight_name = "w1";
    int samples = 100;
    std::uint64_t seed = 7;
    int band_lo = 1;
    int band_hi = 16;
    int per_octave = 32;
    double n_exp = 1.0; ///< measured doubling exponent
    double q_w = 1.0;   ///< estimated critical index of the weight
};

const std::vector<std::string>& known_checks();

/// Runs one named norm-equivalence / boundedness check; throws on an
/// unknown name. Several reports may come back (one per parameter tuple).
std::vector<EquivalenceReport> run_equivalence_check(const std::string& name,
                                                     const SuiteContext& ctx);

} // namespace fsl

#endif
