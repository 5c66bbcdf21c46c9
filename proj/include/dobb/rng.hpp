#pragma once

#include <cstdint>

// Deterministic pseudo-random source used by scene generators, sample rays
// and tests. splitmix64 core with explicit derivations; no standard-library
// distributions, so every platform and run yields identical streams.

namespace dobb {

inline uint64_t splitmix64(uint64_t& state) {
    state += 0x9e3779b97f4a7c15ull;
    uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

class Rng {
public:
    explicit Rng(uint64_t seed) : state_(seed) {}

    uint64_t next_u64() { return splitmix64(state_); }

    // Uniform in [0, 1) with 53 random bits.
    double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    float next_float() { return static_cast<float>(next_double()); }

    // Uniform in [lo, hi).
    double uniform(double lo, double hi) { return lo + (hi - lo) * next_double(); }

    // Uniform in [0, n); n > 0.
    uint64_t next_below(uint64_t n) { return next_u64() % n; }

    // Independent stream derived from this seed and a stream id.
    static Rng derive(uint64_t seed, uint64_t stream) {
        uint64_t s = seed;
        uint64_t a = splitmix64(s);
        s = a ^ (stream * 0x9e3779b97f4a7c15ull + 0x632be59bd9b4e019ull);
        return Rng(splitmix64(s));
    }

private:
    uint64_t state_;
};

}  // namespace dobb
