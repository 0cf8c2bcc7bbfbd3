#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace seqmon {

/// SplitMix64 finalizer; used to derive independent 64-bit seeds.
std::uint64_t splitmix64(std::uint64_t x) noexcept;

/// Order-sensitive hash of a list of 64-bit keys. Used to derive substream and
/// cell seeds, e.g. mix_seed({master, dgp, M, replication}).
std::uint64_t mix_seed(std::initializer_list<std::uint64_t> parts) noexcept;

/// Encodes a real-valued key (gamma, delta, ...) for use in mix_seed.
std::uint64_t key_of(double value) noexcept;

/// Reproducible random source.
///
/// Stream-splitting rule: Rng(seed, stream) seeds a std::mt19937_64 engine with
/// mix_seed({seed, stream}). Replication r of any simulation uses stream r, so
/// results do not depend on how replications are distributed over threads.
///
/// Gaussian variates use the Marsaglia polar transform of two uniforms on
/// (-1, 1), consuming the pair's second variate on the next call. Uniforms use
/// the top 53 bits of the engine output. Both choices are fixed, so a seed
/// reproduces bit-identical streams within a build.
class Rng {
public:
    explicit Rng(std::uint64_t seed, std::uint64_t stream = 0);

    /// Uniform on the open interval (0, 1).
    double uniform() noexcept;
    /// Standard normal variate.
    double normal() noexcept;

private:
    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

}  // namespace seqmon
