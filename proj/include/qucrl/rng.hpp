#pragma once

#include <cstdint>
#include <random>
#include <span>

#include "qucrl/errors.hpp"

namespace qucrl {

// Seeded random stream. All stochastic draws in the library go through this
// wrapper so that runs are reproducible bit-for-bit: the engine is the fully
// specified std::mt19937_64 and uniforms are derived by explicit bit
// manipulation rather than implementation-defined distributions.
class RngStream {
  public:
    explicit RngStream(std::uint64_t seed) : engine_(seed) {}

    // Derives an independent stream from (seed, stream_id) via splitmix64.
    static RngStream derive(std::uint64_t seed, std::uint64_t stream_id) {
        std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream_id + 1);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        z = z ^ (z >> 31);
        return RngStream(z);
    }

    // Uniform in [0, 1).
    double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    // Uniform in [lo, hi).
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    // Random sign, +1 or -1.
    double sign() { return (engine_() & 1ULL) ? 1.0 : -1.0; }

    // Draws an index from a probability vector by CDF walk. The final index
    // absorbs any rounding slack so a row summing to 1 always yields a draw.
    int categorical(std::span<const double> probs) {
        if (probs.empty()) throw InvalidParams("categorical: empty probability vector");
        const double u = uniform01();
        double acc = 0.0;
        for (std::size_t i = 0; i + 1 < probs.size(); ++i) {
            acc += probs[i];
            if (u < acc) return static_cast<int>(i);
        }
        return static_cast<int>(probs.size() - 1);
    }

    std::uint64_t raw() { return engine_(); }

  private:
    std::mt19937_64 engine_;
};

}  // namespace qucrl
