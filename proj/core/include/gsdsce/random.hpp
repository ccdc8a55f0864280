#pragma once

#include <cstdint>
#include <random>

namespace gsdsce {

/// Seedable, splittable random source. Streams are derived deterministically
/// from (seed, index, stream) by SplitMix64 mixing, and the variates below are
/// computed in-house so a given seed yields identical draws on any standard
/// library.
class Rng {
public:
    using result_type = std::uint64_t;

    explicit Rng(std::uint64_t seed = 0) : engine_(mix(seed)) {}

    /// Independent stream for (base_seed, index, stream).
    static Rng derive(std::uint64_t base_seed, std::uint64_t index, std::uint64_t stream = 0) {
        return Rng(mix(mix(mix(base_seed) ^ index) ^ (stream * 0x9e3779b97f4a7c15ULL + 1)));
    }

    /// Child stream of this generator; advances the parent by one draw.
    Rng split() { return Rng(engine_()); }

    static constexpr result_type min() { return std::mt19937_64::min(); }
    static constexpr result_type max() { return std::mt19937_64::max(); }
    result_type operator()() { return engine_(); }

    /// Uniform in [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    /// Standard normal via Box-Muller.
    double gaussian();

    /// Uniform integer in [0, n), n >= 1.
    std::uint64_t below(std::uint64_t n);

    static std::uint64_t mix(std::uint64_t x) {
        x += 0x9e3779b97f4a7c15ULL;
        x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
        x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
        return x ^ (x >> 31);
    }

private:
    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

}  // namespace gsdsce
