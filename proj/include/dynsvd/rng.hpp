#pragma once

#include <cstdint>

namespace dynsvd {

// Counter-based pseudorandom generator. The i-th output is a pure function
// of (seed, i): splitmix64's finalizer applied to seed + i * golden-gamma.
// Every randomized fixture in this repo goes through this generator so that
// outputs are bit-identical across platforms and bindings; never swap it for
// std::mt19937 or rand().
//
//   state_i = seed + i * 0x9E3779B97F4A7C15
//   out_i   = mix(state_i)   with mix = splitmix64 finalizer
class CounterRng {
public:
    explicit CounterRng(std::uint64_t seed, std::uint64_t start_counter = 0)
        : seed_(seed), counter_(start_counter) {}

    std::uint64_t next_u64() {
        std::uint64_t z = seed_ + (++counter_) * 0x9E3779B97F4A7C15ULL;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    // uniform in [0, 1), 53-bit resolution
    double next_double() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    // uniform in [0, 1] scaled to [-1, 1)
    double next_symmetric() { return 2.0 * next_double() - 1.0; }

    // uniform integer in [0, bound); bound > 0. Mask-and-reject keeps the
    // result exactly uniform and platform-independent.
    std::uint64_t next_below(std::uint64_t bound) {
        std::uint64_t mask = ~0ULL;
        std::uint64_t b = bound - 1;
        mask >>= (b == 0) ? 63 : __builtin_clzll(b);
        for (;;) {
            std::uint64_t x = next_u64() & mask;
            if (x < bound) return x;
        }
    }

    // independent substream: outputs never collide with this stream's
    std::uint64_t fork_seed(std::uint64_t tag) {
        std::uint64_t z = seed_ ^ (0xA0761D6478BD642FULL + tag * 0xE7037ED1A0B428DBULL);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    std::uint64_t seed() const { return seed_; }
    std::uint64_t counter() const { return counter_; }

private:
    std::uint64_t seed_;
    std::uint64_t counter_;
};

}  // namespace dynsvd
