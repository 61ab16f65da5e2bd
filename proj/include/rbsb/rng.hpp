#pragma once

#include <array>
#include <cstdint>

namespace rbsb {

/// Counter-based generator (Philox4x32-10, Salmon et al. 2011). Each draw is
/// a pure function of (seed, replicate, stream, index), so results do not
/// depend on thread count or scheduling order.
class CounterRng {
  public:
    /// Purpose tags keep independent draw streams from colliding.
    enum Stream : std::uint32_t {
        observation = 0,
        assurance_mu = 1,
        assurance_obs = 2,
    };

    explicit CounterRng(std::uint64_t seed) : seed_(seed) {}

    std::uint64_t seed() const { return seed_; }

    /// Raw 64-bit output for (replicate, stream, index).
    std::uint64_t bits(std::uint64_t replicate, std::uint32_t stream, std::uint32_t index) const;

    /// Uniform draw strictly inside (0, 1).
    double uniform(std::uint64_t replicate, std::uint32_t stream, std::uint32_t index) const;

    /// Standard normal via the inverse CDF (deterministic, one uniform each).
    double normal(std::uint64_t replicate, std::uint32_t stream, std::uint32_t index) const;

    static std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> counter,
                                                   std::array<std::uint32_t, 2> key);

  private:
    std::uint64_t seed_;
};

}  // namespace rbsb
