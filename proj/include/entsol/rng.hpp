#pragma once

#include <cstdint>

namespace entsol {

// Small deterministic generator (xorshift-star family). Randomized checks in
// reports must produce identical streams across platforms, which rules out
// std:: distributions; this keeps artifact bytes reproducible for a seed.
class Rng {
public:
    explicit Rng(std::uint64_t seed = 0) : state_(seed * 6364136223846793005ULL + 1442695040888963407ULL) {
        next_u64();
    }

    std::uint64_t next_u64() {
        std::uint64_t x = state_;
        x ^= x >> 12;
        x ^= x << 25;
        x ^= x >> 27;
        state_ = x;
        return x * 2685821657736338717ULL;
    }

    // uniform in [0, 1)
    double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    // uniform in [lo, hi)
    double uniform(double lo, double hi) { return lo + (hi - lo) * next_double(); }

    // uniform integer in [0, n)
    std::uint64_t next_below(std::uint64_t n) { return next_u64() % n; }

private:
    std::uint64_t state_;
};

}  // namespace entsol
