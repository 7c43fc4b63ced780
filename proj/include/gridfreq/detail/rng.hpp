#pragma once

#include <cmath>
#include <cstdint>

namespace gridfreq::detail {

/// SplitMix64 (Steele/Lea/Vigna). The algorithm is fixed by its constants, so
/// a given seed yields the same stream on every platform and compiler.
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }

    /// Uniform in [0, 1), 53-bit resolution.
    double next_unit() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    /// Uniform in (0, 1]; safe as a log() argument.
    double next_open_unit() {
        return (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1.0p-53;
    }

private:
    std::uint64_t state_;
};

/// Standard normal deviates: Box-Muller over SplitMix64 uniforms. Both halves
/// of each transform are consumed, so draws come in deterministic pairs.
class GaussianSource {
public:
    explicit GaussianSource(std::uint64_t seed) : rng_(seed) {}

    double next() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        const double u1 = rng_.next_open_unit();
        const double u2 = rng_.next_unit();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = 2.0 * kPi * u2;
        spare_ = r * std::sin(a);
        have_spare_ = true;
        return r * std::cos(a);
    }

private:
    static constexpr double kPi = 3.14159265358979323846264338327950288;
    SplitMix64 rng_;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

}  // namespace gridfreq::detail
