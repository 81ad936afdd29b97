#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

namespace mfa {

/// Counter-based generator: the k-th draw is a SplitMix64 finalizer applied to
/// seed + k * golden. Every platform produces the same stream for a given seed,
/// which is not true of the std:: distributions.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : seed_(seed) {}

    std::uint64_t next();

    /// Uniform on [0, 1) with 53 random bits.
    double uniform01();
    double uniform(double lo, double hi);
    /// Uniform integer in [0, n).
    std::size_t index(std::size_t n);
    /// Standard normal via Box-Muller; the second variate of each pair is cached.
    double normal();

    std::uint64_t seed() const { return seed_; }

private:
    std::uint64_t seed_;
    std::uint64_t counter_ = 0;
    bool hasSpare_ = false;
    double spare_ = 0.0;
};

/// Independent child seed for a named sub-stream of a master seed.
std::uint64_t deriveSeed(std::uint64_t master, std::uint64_t stream);

/// First k entries of a seeded Fisher-Yates shuffle of 0..n-1.
std::vector<std::size_t> sampleWithoutReplacement(std::size_t n, std::size_t k, Rng& rng);

} // namespace mfa
