#pragma once

#include <cstdint>

namespace ccr {

// 64-bit finalizer from SplitMix64; bijective, used for seed derivation.
inline std::uint64_t mix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline std::uint64_t hash_seed(std::uint64_t a, std::uint64_t b) {
    return mix64(a ^ mix64(b));
}

// Splittable counter-based generator (SplitMix64). All randomness in the
// project flows through this type so that runs are bit-identical across
// platforms: decisions are made on integer draws, never on distribution
// objects from <random>.
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    // Uniform in [0, 1), 53 random bits.
    double next_double() {
        return static_cast<double>(next() >> 11) * 0x1.0p-53;
    }

    double next_in(double lo, double hi) {
        return lo + (hi - lo) * next_double();
    }

    // Unbiased uniform integer in [0, bound) via rejection.
    std::uint64_t next_below(std::uint64_t bound) {
        std::uint64_t threshold = (-bound) % bound;
        for (;;) {
            std::uint64_t r = next();
            if (r >= threshold) return r % bound;
        }
    }

    // True with probability p; decided by comparing one 64-bit draw against a
    // fixed integer threshold, so the outcome is platform-independent.
    bool next_bernoulli(double p) {
        if (p <= 0.0) return false;
        if (p >= 1.0) return true;
        const auto threshold = static_cast<std::uint64_t>(p * 0x1.0p64);
        return next() < threshold;
    }

    // Uniform sign in {-1, +1}.
    double next_sign() {
        return (next() >> 63) ? 1.0 : -1.0;
    }

    // Independent substream; the parent advances by one draw.
    SplitMix64 split() {
        return SplitMix64(mix64(next()));
    }

private:
    std::uint64_t state_;
};

} // namespace ccr
