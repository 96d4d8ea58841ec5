#pragma once

// Deterministic, splittable random streams.
//
// Every stochastic component (trajectory, bootstrap, pair sampling) owns an
// Rng seeded through derive_seed(base, {tags...}); the tag list acts as a
// counter path, so streams never collide and runs are bit-reproducible for a
// fixed base seed. Uniform/normal variates are generated from raw mt19937_64
// words rather than std::uniform_real_distribution, whose algorithm is
// implementation-defined.

#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <random>

#include "ladder/common.hpp"

namespace ladder {

inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Child seed from a base seed and a tag path, e.g. {grid_point, trajectory}.
inline std::uint64_t derive_seed(std::uint64_t base, std::initializer_list<std::uint64_t> tags) {
    std::uint64_t state = base ^ 0xd1b54a32d192ed03ULL;
    std::uint64_t out = splitmix64(state);
    for (std::uint64_t tag : tags) {
        state ^= tag + 0x9e3779b97f4a7c15ULL + (state << 6) + (state >> 2);
        out = splitmix64(state);
    }
    return out;
}

class Rng {
  public:
    explicit Rng(std::uint64_t seed) {
        std::uint64_t s = seed;
        std::seed_seq seq{static_cast<std::uint32_t>(splitmix64(s)),
                          static_cast<std::uint32_t>(splitmix64(s)),
                          static_cast<std::uint32_t>(splitmix64(s)),
                          static_cast<std::uint32_t>(splitmix64(s)),
                          static_cast<std::uint32_t>(splitmix64(s)),
                          static_cast<std::uint32_t>(splitmix64(s))};
        engine_.seed(seq);
    }

    std::uint64_t next_u64() { return engine_(); }

    // Uniform on [0,1) with 53-bit resolution.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    // Uniform on (0,1]; measurement protocol draws live on the half-open
    // interval so that probability-0 and probability-1 branches are exact.
    double uniform_open_closed() { return 1.0 - uniform(); }

    // Unbiased integer in [0, n).
    std::uint64_t uniform_index(std::uint64_t n) {
        if (n == 0) throw parameter_error("uniform_index: n must be positive");
        const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                                    std::numeric_limits<std::uint64_t>::max() % n;
        std::uint64_t x;
        do {
            x = engine_();
        } while (x >= limit);
        return x % n;
    }

    // Standard normal via Box-Muller (deterministic given the stream).
    double normal() {
        const double u1 = uniform_open_closed();
        const double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * kPi * u2);
    }

    complexd complex_normal() { return {normal(), normal()}; }

  private:
    std::mt19937_64 engine_;
};

}  // namespace ladder
