#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace rydvqe {

/// Seeded random stream owned by a single run.
///
/// The engine is std::mt19937_64, whose output sequence is fixed by the C++
/// standard. The mapping to doubles and bounded integers is done here rather
/// than through <random> distributions, whose algorithms are left to the
/// library vendor, so a seed reproduces the same draws on every toolchain.
class Rng {
public:
    static constexpr std::string_view kGeneratorName = "mt19937_64/u53-lemire";

    explicit Rng(std::uint64_t seed) : engine_(seed), seed_(seed) {}

    std::uint64_t seed() const { return seed_; }

    std::uint64_t next_u64() { return engine_(); }

    /// Uniform on [0, 1) with 53 random mantissa bits.
    double uniform();

    /// Uniform on [lo, hi).
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Uniform integer in [0, n), unbiased (Lemire's multiply-and-reject).
    std::uint64_t uniform_index(std::uint64_t n);

private:
    std::mt19937_64 engine_;
    std::uint64_t seed_;
};

/// SplitMix64 finalizer.
std::uint64_t splitmix64(std::uint64_t x);

/// Seed of ensemble member k: splitmix64(base + (k + 1) * golden gamma) xor'd
/// with a second mix of base. Members are independent of the ensemble size,
/// so an ensemble can be extended without changing earlier runs.
std::uint64_t derive_seed(std::uint64_t base_seed, std::uint64_t k);

}  // namespace rydvqe
