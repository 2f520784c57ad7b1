#pragma once

#include <cstdint>

namespace vw {

/// SplitMix64 (Steele, Lea & Flood). Every derivation in random mode draws
/// from its own stream, `SplitMix64::stream(seed, index)`, so results depend
/// only on the seed and never on the platform's <random> implementation.
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) noexcept : state_(seed) {}

    static SplitMix64 stream(std::uint64_t seed, std::uint64_t index) noexcept {
        return SplitMix64(mix(seed + (index + 1) * kGolden));
    }

    std::uint64_t next() noexcept { return mix(state_ += kGolden); }

    /// Uniform in [0, bound), bound > 0; rejection keeps it unbiased.
    std::uint64_t below(std::uint64_t bound) noexcept {
        const std::uint64_t threshold = (0 - bound) % bound;
        for (;;) {
            std::uint64_t r = next();
            if (r >= threshold) return r % bound;
        }
    }

private:
    static constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;

    static std::uint64_t mix(std::uint64_t z) noexcept {
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    std::uint64_t state_;
};

} // namespace vw
