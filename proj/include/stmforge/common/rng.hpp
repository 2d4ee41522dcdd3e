#pragma once

#include <cstdint>
#include <random>
#include <span>

namespace stmforge {

/// SplitMix64 finalizer. Used to derive independent child seeds.
std::uint64_t splitmix64(std::uint64_t x);

/// Child seed for stream `stream` of `parent`. Stable across platforms.
std::uint64_t derive_seed(std::uint64_t parent, std::uint64_t stream);

/// Seeded random source.
///
/// Wraps std::mt19937_64 (whose output sequence is fixed by the standard) and
/// maps raw 64-bit draws to distributions with explicit formulas, so the same
/// seed yields the same draws under every standard library.
class Rng {
public:
    explicit Rng(std::uint64_t seed);

    std::uint64_t seed() const { return seed_; }
    std::uint64_t next_u64() { return engine_(); }

    /// Uniform on [0, 1) with 53 bits of resolution.
    double uniform();
    double uniform(double lo, double hi);
    /// Uniform integer on the closed range [lo, hi].
    int uniform_int(int lo, int hi);
    bool bernoulli(double p);
    /// Standard normal via the Marsaglia polar method (no cached second value).
    double normal();
    double normal(double mean, double stddev) { return mean + stddev * normal(); }
    /// Index drawn with the given (not necessarily normalized) weights.
    std::size_t categorical(std::span<const double> weights);

private:
    std::uint64_t seed_;
    std::mt19937_64 engine_;
};

}  // namespace stmforge
