#pragma once

#include <cstdint>
#include <string_view>

namespace causeval::rng {

// Deterministic generators with explicit state. The standard <random>
// distributions are implementation-defined, so every sampled value in this
// project flows through these routines instead; results are identical across
// compilers and standard libraries, which keeps seeded runs and frozen test
// values portable.

inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

inline std::uint64_t fnv1a(std::string_view s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

// Small stream generator. Sub-streams are derived by mixing tags into the
// seed, so the draw order of one consumer never perturbs another.
class Stream {
  public:
    explicit Stream(std::uint64_t seed) : state_(seed) {
        // one warm-up step so seed 0 does not start from raw zero state
        splitmix64(state_);
    }

    Stream derive(std::uint64_t tag) const {
        std::uint64_t s = state_ ^ (0x9e3779b97f4a7c15ULL + tag * 0xff51afd7ed558ccdULL);
        return Stream(s);
    }
    Stream derive(std::string_view tag) const { return derive(fnv1a(tag)); }

    std::uint64_t next_u64() { return splitmix64(state_); }

    // uniform in [0, 1)
    double next_unit() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    // uniform in [0, bound); bound > 0. Rejection keeps it unbiased.
    std::uint64_t below(std::uint64_t bound) {
        const std::uint64_t threshold = (0 - bound) % bound;
        for (;;) {
            std::uint64_t r = next_u64();
            if (r >= threshold) return r % bound;
        }
    }

    bool bernoulli(double p) { return next_unit() < p; }

  private:
    std::uint64_t state_;
};

}  // namespace causeval::rng
