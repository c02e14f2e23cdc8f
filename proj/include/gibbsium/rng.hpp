#pragma once

#include <cstdint>

namespace gibbsium {

// Counter-based splittable generator. Output i of stream (key) is a pure
// function mix(key, i), so independent workers can consume disjoint counter
// ranges or split off child streams without sharing state. All arithmetic is
// exact uint64, so results are identical across platforms.
struct Rng {
    uint64_t key = 0;
    uint64_t ctr = 0;

    explicit Rng(uint64_t seed = 0, uint64_t stream = 0)
        : key(mix(seed ^ 0x9e3779b97f4a7c15ULL, stream)), ctr(0) {}

    static uint64_t mix(uint64_t k, uint64_t x) {
        uint64_t z = x + 0x9e3779b97f4a7c15ULL + k;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    uint64_t next_u64() { return mix(key, ctr++); }

    // Child stream derived from the current position; advancing the parent
    // afterwards never collides with the child.
    Rng split() {
        Rng child;
        child.key = mix(key ^ 0x5851f42d4c957f2dULL, ctr++);
        child.ctr = 0;
        return child;
    }

    // Uniform in [0,1) with 53 random bits.
    double uniform() { return (next_u64() >> 11) * (1.0 / 9007199254740992.0); }

    bool bernoulli(double p) { return uniform() < p; }

    // Uniform integer in [0, n), n >= 1. Modulo bias is < n/2^64, far below
    // any tolerance used here, and keeps the draw count deterministic.
    uint64_t below(uint64_t n) { return next_u64() % n; }

    int pm_one() { return (next_u64() & 1) ? 1 : -1; }
};

}  // namespace gibbsium
