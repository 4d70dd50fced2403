#pragma once

#include <cstdint>

namespace gridreg {

/// Counter-based generator: output k of stream (seed, stream) is a pure
/// function of (seed, stream, k), so independent streams can be handed to
/// workers without any shared state. Bit-identical on every platform.
class CounterRng {
public:
    CounterRng(std::uint64_t seed, std::uint64_t stream) noexcept;

    std::uint64_t next_u64() noexcept;

    /// Uniform integer in [0, n). n must be >= 1.
    std::uint64_t uniform_index(std::uint64_t n) noexcept;

    /// Uniform double in [0, 1) with 53 random bits.
    double uniform01() noexcept;

    double uniform(double lo, double hi) noexcept { return lo + (hi - lo) * uniform01(); }

    bool bernoulli(double p) noexcept { return uniform01() < p; }

    /// Standard normal (Box-Muller, one value per call).
    double normal() noexcept;

    /// Gamma(shape, scale) via Marsaglia-Tsang; shape > 0.
    double gamma(double shape, double scale) noexcept;

    std::uint64_t counter() const noexcept { return counter_; }

private:
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

/// SplitMix64 finaliser.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

}  // namespace gridreg
