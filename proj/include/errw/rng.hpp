// rng.hpp - SplitMix64 counter generator with per-replica stream derivation.
//
// Generator: SplitMix64 (Steele/Lea/Flood, "Fast splittable pseudorandom number
// generators", OOPSLA 2014; output function as in Vigna's public-domain C
// reference, v1.0). The state is a Weyl counter with the golden-ratio
// increment; each output is a finalizer hash of the counter, so the generator
// is counter-based and cheap to split. Replica k of a run with master seed s
// draws from stream(s, k); streams are independent of scheduling order.
#pragma once

#include <cmath>
#include <cstdint>

namespace errw {

inline std::uint64_t splitmix64_hash(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    // Stream k of master seed: both words pass through the finalizer so that
    // nearby (seed, k) pairs land in unrelated counter positions.
    static SplitMix64 stream(std::uint64_t seed, std::uint64_t k) {
        return SplitMix64(splitmix64_hash(seed) ^
                          splitmix64_hash(0x9E3779B97F4A7C15ULL * (k + 1)));
    }

    std::uint64_t next_u64() {
        state_ += 0x9E3779B97F4A7C15ULL;
        return splitmix64_hash(state_);
    }

    // 53-bit uniform in [0, 1)
    double next_double() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    // uniform in (0, 1], safe as a log() argument
    double next_double_pos() {
        return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
    }

    // uniform integer in [0, n)
    std::uint64_t next_below(std::uint64_t n) {
        // multiply-shift; bias < 2^-64, irrelevant at simulation scale
        return mul_high(next_u64(), n);
    }

    // standard normal via Box-Muller, second draw cached
    double next_normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        const double u1 = next_double_pos();
        const double u2 = next_double();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = 6.283185307179586476925286766559 * u2;
        spare_ = r * std::sin(a);
        have_spare_ = true;
        return r * std::cos(a);
    }

private:
    // portable high word of a 64x64 product
    static std::uint64_t mul_high(std::uint64_t a, std::uint64_t b) {
        const std::uint64_t a_lo = a & 0xFFFFFFFFULL, a_hi = a >> 32;
        const std::uint64_t b_lo = b & 0xFFFFFFFFULL, b_hi = b >> 32;
        const std::uint64_t mid = a_hi * b_lo + ((a_lo * b_lo) >> 32);
        const std::uint64_t mid2 = a_lo * b_hi + (mid & 0xFFFFFFFFULL);
        return a_hi * b_hi + (mid >> 32) + (mid2 >> 32);
    }

    std::uint64_t state_;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

} // namespace errw
