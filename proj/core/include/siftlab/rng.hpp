#pragma once

#include <cstdint>

namespace siftlab {

// SplitMix64 (Vigna). Used for seed expansion only.
struct SplitMix64 {
    uint64_t state;

    explicit SplitMix64(uint64_t seed) : state(seed) {}

    uint64_t next() {
        uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }
};

// xoshiro256** with counter-derived substreams.
//
// Substream derivation is a pure function of (master_seed, stream_index):
// the same pair always yields the same bit stream, and distinct indices
// yield streams that are independent for Monte Carlo purposes. This is what
// makes trial results independent of worker count and execution order.
class Rng {
public:
    Rng(uint64_t master_seed, uint64_t stream_index) {
        SplitMix64 sm(master_seed ^ (0x9E3779B97F4A7C15ULL * (stream_index + 1)));
        s_[0] = sm.next();
        s_[1] = sm.next();
        s_[2] = sm.next();
        s_[3] = sm.next();
        // all-zero state is invalid for xoshiro
        if ((s_[0] | s_[1] | s_[2] | s_[3]) == 0) s_[3] = 1;
    }

    uint64_t next_u64() {
        const uint64_t result = rotl(s_[1] * 5, 7) * 9;
        const uint64_t t = s_[1] << 17;
        s_[2] ^= s_[0];
        s_[3] ^= s_[1];
        s_[1] ^= s_[2];
        s_[0] ^= s_[3];
        s_[2] ^= t;
        s_[3] = rotl(s_[3], 45);
        return result;
    }

    // uniform in [0, 1), 53-bit resolution, identical on every platform
    double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    bool bernoulli(double p) { return next_double() < p; }

    int coin() { return static_cast<int>(next_u64() >> 63); }

    // uniform integer in [0, bound), bound >= 1; rejection keeps it unbiased
    uint64_t below(uint64_t bound) {
        const uint64_t threshold = (0 - bound) % bound;
        for (;;) {
            uint64_t r = next_u64();
            if (r >= threshold) return r % bound;
        }
    }

private:
    static uint64_t rotl(uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

    uint64_t s_[4];
};

} // namespace siftlab
