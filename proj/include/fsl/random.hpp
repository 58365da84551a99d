#ifndef FSL_RANDOM_HPP
#define FSL_RANDOM_HPP

#include <cmath>
#include <cstdint>

#include "fsl/operator.hpp"

namespace fsl {

/// splitmix64-based generator with an explicit Box-Muller normal, so the
/// stream is fixed by the seed alone (no library-dependent distributions).
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }

    double uniform() { // in [0, 1)
        return static_cast<double>(next() >> 11) * 0x1.0p-53;
    }

    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = uniform(), u2 = uniform();
        if (u1 <= 0.0) u1 = 0x1.0p-53;
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double theta = 2.0 * M_PI * u2;
        spare_ = r * std::sin(theta);
        have_spare_ = true;
        return r * std::cos(theta);
    }

private:
    std::uint64_t state_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

/// Random band-limited field: i.i.d. standard normal coefficients on the
/// eigenvector band [band_lo, band_hi] (indices into the ascending
/// spectrum), zero elsewhere. band_lo is clamped past ker L.
inline Vec random_band_field(const SelfAdjointOperator& op, int band_lo, int band_hi, Rng& rng) {
    Vec c(op.size(), 0.0);
    const int lo = std::max(band_lo, op.kernel_dim());
    const int hi = std::min<int>(band_hi, static_cast<int>(op.size()) - 1);
    for (int k = lo; k <= hi; ++k) c[static_cast<std::size_t>(k)] = rng.normal();
    return op.synthesize(c);
}

} // namespace fsl

#endif
