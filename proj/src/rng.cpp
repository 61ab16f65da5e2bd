#include "rbsb/rng.hpp"

#include "rbsb/gaussian.hpp"

namespace rbsb {

namespace {

constexpr std::uint32_t kWeylA = 0x9E3779B9u;
constexpr std::uint32_t kWeylB = 0xBB67AE85u;
constexpr std::uint32_t kMultA = 0xD2511F53u;
constexpr std::uint32_t kMultB = 0xCD9E8D57u;

inline void round_once(std::array<std::uint32_t, 4>& ctr, const std::array<std::uint32_t, 2>& key) {
    const std::uint64_t prod0 = static_cast<std::uint64_t>(kMultA) * ctr[0];
    const std::uint64_t prod1 = static_cast<std::uint64_t>(kMultB) * ctr[2];
    const std::uint32_t hi0 = static_cast<std::uint32_t>(prod0 >> 32);
    const std::uint32_t lo0 = static_cast<std::uint32_t>(prod0);
    const std::uint32_t hi1 = static_cast<std::uint32_t>(prod1 >> 32);
    const std::uint32_t lo1 = static_cast<std::uint32_t>(prod1);
    ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
}

}  // namespace

std::array<std::uint32_t, 4> CounterRng::philox4x32(std::array<std::uint32_t, 4> counter,
                                                    std::array<std::uint32_t, 2> key) {
    for (int r = 0; r < 10; ++r) {
        round_once(counter, key);
        key[0] += kWeylA;
        key[1] += kWeylB;
    }
    return counter;
}

std::uint64_t CounterRng::bits(std::uint64_t replicate, std::uint32_t stream,
                               std::uint32_t index) const {
    const std::array<std::uint32_t, 4> ctr = {
        static_cast<std::uint32_t>(replicate), static_cast<std::uint32_t>(replicate >> 32),
        stream, index};
    const std::array<std::uint32_t, 2> key = {static_cast<std::uint32_t>(seed_),
                                              static_cast<std::uint32_t>(seed_ >> 32)};
    const auto out = philox4x32(ctr, key);
    return (static_cast<std::uint64_t>(out[1]) << 32) | out[0];
}

double CounterRng::uniform(std::uint64_t replicate, std::uint32_t stream,
                           std::uint32_t index) const {
    const std::uint64_t x = bits(replicate, stream, index);
    // 53-bit mantissa, offset half a step so the result stays in (0, 1).
    return (static_cast<double>(x >> 11) + 0.5) * (1.0 / 9007199254740992.0);
}

double CounterRng::normal(std::uint64_t replicate, std::uint32_t stream,
                          std::uint32_t index) const {
    return normal_quantile(uniform(replicate, stream, index));
}

}  // namespace rbsb
