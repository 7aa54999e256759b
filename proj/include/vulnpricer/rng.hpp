#pragma once

#include <array>
#include <cstdint>

namespace vulnpricer {

/// Philox4x32 with 10 rounds (Salmon et al. counter-based generator).
[[nodiscard]] std::array<std::uint32_t, 4> philox4x32_10(std::array<std::uint32_t, 4> counter,
                                                          std::array<std::uint32_t, 2> key);

/// Substream k of a seed: the n-th variate is a pure function of (seed, k, n),
/// so path batches can be generated in any order on any thread.
class CounterStream {
public:
    CounterStream(std::uint64_t seed, std::uint32_t substream) : seed_(seed), substream_(substream) {}

    /// Uniform on the open interval (0, 1) with 53 random bits.
    [[nodiscard]] double uniform(std::uint64_t n) const;
    /// Standard normal via the inverse CDF of uniform(n).
    [[nodiscard]] double normal(std::uint64_t n) const;

    [[nodiscard]] std::uint64_t seed() const { return seed_; }
    [[nodiscard]] std::uint32_t substream() const { return substream_; }

private:
    std::uint64_t seed_;
    std::uint32_t substream_;
};

}  // namespace vulnpricer
