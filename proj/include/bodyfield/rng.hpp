#pragma once

#include <cstdint>

namespace bodyfield {

/// Counter-based generator: every draw is a pure function of
/// (seed, stream, counter), so results never depend on evaluation order.
/// Mixing is the SplitMix64 finalizer applied to a combined key.
class CounterRng {
public:
    explicit CounterRng(std::uint64_t seed = 0) : seed_(seed) {}

    std::uint64_t seed() const { return seed_; }

    std::uint64_t bits(std::uint64_t stream, std::uint64_t counter) const {
        std::uint64_t key = mix(seed_ ^ 0x6a09e667f3bcc909ULL);
        key = mix(key ^ (stream * 0x9e3779b97f4a7c15ULL));
        return mix(key ^ (counter + 0xbb67ae8584caa73bULL));
    }

    /// Uniform double in [0, 1) with 53 random bits.
    double uniform(std::uint64_t stream, std::uint64_t counter) const {
        return static_cast<double>(bits(stream, counter) >> 11) * 0x1.0p-53;
    }

    static std::uint64_t mix(std::uint64_t z) {
        z += 0x9e3779b97f4a7c15ULL;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

private:
    std::uint64_t seed_;
};

}  // namespace bodyfield
