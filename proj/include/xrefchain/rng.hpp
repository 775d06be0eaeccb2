#pragma once

#include <cstdint>
#include <random>

namespace xref {

// SplitMix64 step; used for seed mixing so derived streams stay decorrelated.
inline std::uint64_t splitmix64(std::uint64_t& state) {
    state += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Deterministic sub-stream seed: mixing is not sensitive to stream ordering.
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream) {
    std::uint64_t s = base ^ (0x9e3779b97f4a7c15ULL * (stream + 1));
    return splitmix64(s);
}

// mt19937_64 has a standard-specified output sequence, so simulations seeded
// through this wrapper reproduce bit-identically across platforms. The float
// conversions are hand-rolled because std::uniform_real_distribution is not
// portable across standard library implementations.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    // Uniform double strictly inside (0, 1).
    double next_open01() {
        const std::uint64_t x = engine_() >> 11; // top 53 bits
        return (static_cast<double>(x) + 0.5) * (1.0 / 9007199254740992.0);
    }

    // Uniform integer in [0, n), n > 0. Rejection sampling keeps it unbiased.
    std::uint64_t next_below(std::uint64_t n) {
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
        std::uint64_t x;
        do {
            x = engine_();
        } while (x >= limit);
        return x % n;
    }

private:
    std::mt19937_64 engine_;
};

} // namespace xref
