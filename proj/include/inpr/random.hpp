#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace inpr {

/// SplitMix64 finalizer. Used to derive independent stream seeds.
std::uint64_t splitmix64(std::uint64_t x) noexcept;

/// Mixes a base seed with a sequence of stream identifiers (rep, replicate, role...).
std::uint64_t derive_seed(std::uint64_t seed, std::initializer_list<std::uint64_t> stream) noexcept;

/// Random source with platform-independent variates.
///
/// The engine is std::mt19937_64, whose output sequence is fixed by the
/// standard. The uniform and normal transforms are implemented here rather
/// than through <random> distributions, whose algorithms are unspecified.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    /// Uniform on [0, 1) with 53 random bits.
    double uniform();

    /// Uniform on (0, 1].
    double uniform_pos();

    /// Standard normal via Box-Muller; consumes exactly two uniforms.
    double normal();

    /// Uniform integer in [0, bound) by rejection on the top bits.
    std::uint64_t below(std::uint64_t bound);

private:
    std::mt19937_64 engine_;
};

}  // namespace inpr
