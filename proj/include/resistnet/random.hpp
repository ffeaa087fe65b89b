#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace resistnet {

/// Seedable, platform-independent random source.
///
/// The engine is std::mt19937_64, whose output sequence is fixed by the C++
/// standard. All value mappings (uniform reals, bounded integers) are
/// implemented here rather than through std::*_distribution, because the
/// standard does not pin down distribution algorithms and traces must be
/// reproducible bit-exactly across platforms.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    /// Uniform double in [0, 1), 53 random bits.
    double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    /// Uniform double in [lo, hi).
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    /// Uniform double in (lo, hi]; the open lower end matters when sampling
    /// conductances that must stay strictly positive.
    double uniform_open_low(double lo, double hi) {
        return lo + (hi - lo) * (1.0 - uniform01());
    }

    /// Log-uniform double in [lo, hi], lo > 0.
    double log_uniform(double lo, double hi) {
        return lo * std::exp(uniform01() * std::log(hi / lo));
    }

    /// Unbiased uniform integer in [0, n). Rejection sampling over the top
    /// of the 64-bit range, no modulo bias.
    std::uint64_t uniform_index(std::uint64_t n) {
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
        std::uint64_t x;
        do {
            x = next_u64();
        } while (x >= limit);
        return x % n;
    }

    /// Deterministically derive an independent stream seed, so that the
    /// consumers of one run (target generation, sample draws, drivers) do
    /// not share state. SplitMix64 finalizer.
    static std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
        std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

private:
    std::mt19937_64 engine_;
};

}  // namespace resistnet
