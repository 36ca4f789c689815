#pragma once

#include <cmath>
#include <cstdint>

namespace gaugeclust {

/// SplitMix64 generator. Platform-independent, so seeded outputs are
/// bit-reproducible everywhere.
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) noexcept : state_(seed) {}

    std::uint64_t next() noexcept {
        std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    /// Uniform in [0, 1).
    double uniform() noexcept { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    /// Uniform in the open interval (0, 1).
    double uniform_open() noexcept { return (static_cast<double>(next() >> 11) + 0.5) * 0x1.0p-53; }

    /// Uniform integer in [0, bound). bound must be positive.
    std::uint64_t below(std::uint64_t bound) noexcept {
        return static_cast<std::uint64_t>(uniform() * static_cast<double>(bound)) % bound;
    }

    /// Independent stream keyed by (seed, a, b).
    static SplitMix64 stream(std::uint64_t seed, std::uint64_t a, std::uint64_t b) noexcept {
        SplitMix64 mixer(seed);
        std::uint64_t s = mixer.next();
        s ^= SplitMix64(a * 0x9E3779B97F4A7C15ULL + 1).next();
        s ^= SplitMix64(b * 0xC2B2AE3D27D4EB4FULL + 2).next() * 3;
        return SplitMix64(s);
    }

private:
    std::uint64_t state_;
};

}  // namespace gaugeclust
