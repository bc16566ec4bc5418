#pragma once

#include <cmath>
#include <cstdint>

namespace varma {

// SplitMix64 stream generator (Steele, Lea, Flood 2014). One 64-bit state,
// advances by a fixed odd gamma; the output scrambler is a bijection, so
// distinct seeds give distinct streams. All simulation randomness in the
// toolkit flows through this generator so that a (seed, config) pair pins
// the output bit-for-bit on a given platform.
class SplitMix64 {
  public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    // Uniform double in [0, 1) with 53 random bits.
    double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    // Uniform integer in [0, n), n >= 1. Rejection keeps it exactly uniform.
    std::uint64_t bounded(std::uint64_t n) {
        const std::uint64_t threshold = (0 - n) % n;
        for (;;) {
            const std::uint64_t r = next();
            if (r >= threshold) return r % n;
        }
    }

    // Standard normal via the Marsaglia polar method. Uses only sqrt/log so
    // the stream is reproducible across runs; pairs are cached.
    double gaussian() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double u, v, s;
        do {
            u = 2.0 * uniform01() - 1.0;
            v = 2.0 * uniform01() - 1.0;
            s = u * u + v * v;
        } while (s >= 1.0 || s == 0.0);
        const double f = std::sqrt(-2.0 * std::log(s) / s);
        spare_ = v * f;
        has_spare_ = true;
        return u * f;
    }

  private:
    std::uint64_t state_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

// Derives a sub-stream seed from a base seed and a small role tag. Used to
// hand independent streams to the simulator and the outlier-location draw
// within one replication: both depend on the replication seed only, never
// on the contamination kind, so CLEAN/AO/IO runs at the same base seed see
// identical innovation paths and identical outlier locations.
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t tag) {
    SplitMix64 g(base ^ (tag * 0xD1B54A32D192ED03ULL));
    return g.next();
}

}  // namespace varma
