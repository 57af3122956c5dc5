#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "regretlab/vec.hpp"

namespace regretlab {

// Deterministic generator used everywhere randomness is needed.
//
// The stream is splitmix64 (Steele/Lea/Flood 2014): state advances by the
// golden-ratio increment and the output is finalized with two xor-shift
// multiplies. The algorithm is fixed so that a seed identifies one stream on
// every platform. Uniform doubles take the top 53 bits; normal deviates use
// the Marsaglia polar method on top of that stream.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : seed_(seed), state_(seed) {}

    std::uint64_t next_u64() {
        state_ += 0x9E3779B97F4A7C15ULL;
        std::uint64_t z = state_;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    // Uniform in [0, 1) with 53 random bits.
    double uniform() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // Integer in [0, n).
    std::uint64_t below(std::uint64_t n) {
        // Modulo bias is irrelevant at the sizes used here (n << 2^64).
        return next_u64() % n;
    }

    // Standard normal via the polar method. One spare is cached.
    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u, v, s;
        do {
            u = 2.0 * uniform() - 1.0;
            v = 2.0 * uniform() - 1.0;
            s = u * u + v * v;
        } while (s >= 1.0 || s == 0.0);
        const double f = std::sqrt(-2.0 * std::log(s) / s);
        spare_ = v * f;
        have_spare_ = true;
        return u * f;
    }

    Vec normal_vec(int dim) {
        Vec out(static_cast<std::size_t>(dim));
        for (auto& x : out) x = normal();
        return out;
    }

    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            std::size_t j = static_cast<std::size_t>(below(i));
            std::swap(v[i - 1], v[j]);
        }
    }

    // Derives an independent stream from the construction seed and a tag.
    // Does not consume state of this generator.
    Rng split(std::uint64_t tag) const {
        std::uint64_t z = seed_ + 0x9E3779B97F4A7C15ULL * (tag + 1);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return Rng(z ^ (z >> 31));
    }

    std::uint64_t seed() const { return seed_; }

private:
    std::uint64_t seed_;
    std::uint64_t state_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

}  // namespace regretlab
