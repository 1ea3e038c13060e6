#pragma once

#include <cstdint>

namespace gtreg {

/// Reproducible generator: xoshiro256++ seeded through splitmix64.
/// The exact algorithms are fixed so that streams can be reproduced outside
/// this library; normal draws use the inverse-CDF method (normal_quantile),
/// not std::normal_distribution, which is implementation-defined.
class Rng {
public:
    explicit Rng(std::uint64_t seed);

    std::uint64_t next_u64();

    /// Uniform on the open interval (0,1), 53-bit resolution.
    double uniform();

    /// Standard normal via Phi^{-1}(uniform()).
    double normal();

    /// Independent stream derived from (seed, stream id); used for
    /// per-replication seeding in Monte Carlo loops.
    static Rng stream(std::uint64_t seed, std::uint64_t id);

private:
    std::uint64_t s_[4];
};

std::uint64_t splitmix64(std::uint64_t& state);

}  // namespace gtreg
