#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "spgc/error.hpp"
#include "spgc/numeric.hpp"

namespace spgc {

/// splitmix64 step; used to derive independent stream seeds.
inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t root, std::uint64_t stream, std::uint64_t index = 0) {
    std::uint64_t s = root;
    std::uint64_t a = splitmix64(s);
    s = a ^ (stream * 0x9e3779b97f4a7c15ULL + 0x2545f4914f6cdd1dULL);
    std::uint64_t b = splitmix64(s);
    s = b ^ (index * 0xda942042e4dd58b5ULL + 1);
    return splitmix64(s);
}

/// mt19937_64 with explicitly pinned derived draws (uniform doubles, bounded
/// ints, categoricals). std::mt19937_64 output is fully specified by the
/// standard, and the derivations below avoid the implementation-defined
/// std::*_distribution adaptors, so sequences reproduce across platforms.
/// split() yields an independent stream, making batch sampling reproducible
/// regardless of evaluation order.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed), seed_base_(seed) {}

    Rng split(std::uint64_t stream, std::uint64_t index = 0) const {
        return Rng(derive_seed(seed_base_, stream, index));
    }

    std::uint64_t next_u64() { return engine_(); }

    /// Uniform in [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    /// Uniform integer in [0, n). Multiply-shift reduction.
    std::uint64_t bounded(std::uint64_t n) {
        return static_cast<std::uint64_t>((static_cast<unsigned __int128>(engine_()) * n) >> 64);
    }

    /// Standard normal via Box-Muller.
    double normal() {
        double u1 = uniform();
        while (u1 <= 0.0) u1 = uniform();
        double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * 3.14159265358979323846 * u2);
    }

    /// Draw an index from unnormalized log-probabilities.
    std::size_t categorical_from_log(std::span<const double> log_weights) {
        double z = log_sum_exp(log_weights);
        if (z == kNegInf) raise(ErrorKind::numeric, "categorical draw from zero-mass distribution");
        double u = uniform();
        double acc = 0.0;
        std::size_t last = 0;
        for (std::size_t i = 0; i < log_weights.size(); ++i) {
            double p = std::exp(log_weights[i] - z);
            if (p > 0.0) last = i;
            acc += p;
            if (u < acc) return i;
        }
        return last; // rounding spill: land on the last positive-mass entry
    }

    /// Fisher-Yates with pinned bounded draws.
    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            std::size_t j = static_cast<std::size_t>(bounded(i));
            std::swap(v[i - 1], v[j]);
        }
    }

private:
    std::mt19937_64 engine_;
    std::uint64_t seed_base_;
};

} // namespace spgc
