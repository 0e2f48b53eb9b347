#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace cfair {

/// Seeded 64-bit generator with platform-independent sampling helpers.
/// (std distributions are implementation-defined, so the conversions are done by hand.)
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next() { return engine_(); }
    /// Uniform in [0, 1).
    double uniform() { return double(engine_() >> 11) * 0x1.0p-53; }
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
    /// Uniform integer in [0, bound).
    std::uint64_t below(std::uint64_t bound);
    /// Standard normal via Box-Muller.
    double normal();

    /// Fisher-Yates shuffle of 0..n-1.
    std::vector<std::size_t> permutation(std::size_t n);

private:
    std::mt19937_64 engine_;
};

/// Mixes a base seed with a stream tag so that sub-components draw independent streams.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t tag);

}  // namespace cfair
