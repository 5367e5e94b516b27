#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace chirp2d {

/// SplitMix64 finalizer. Bijective on 64-bit words.
std::uint64_t mix64(std::uint64_t x) noexcept;

/// Counter-based seed derivation used for stream splitting.
///
/// The derived seed is a chained SplitMix64 hash of the base seed and every
/// index in `path`, e.g. derive_seed(base, {size_index, sigma_index, rep}).
/// Distinct paths give statistically independent streams, and any single
/// replication can be regenerated without replaying the others.
std::uint64_t derive_seed(std::uint64_t base, std::initializer_list<std::uint64_t> path) noexcept;

/// Portable standard-normal source.
///
/// Built on std::mt19937_64, whose output sequence is fixed by the C++
/// standard, and on the Marsaglia polar method implemented here (the
/// standard library distributions are implementation-defined). The same seed
/// yields the same draws on every platform, up to last-bit differences in
/// std::log between math libraries.
class GaussianSource {
public:
    explicit GaussianSource(std::uint64_t seed);

    double operator()();

    /// Uniform draw in [0, 1) with 53 random bits.
    double uniform();

private:
    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

} // namespace chirp2d
