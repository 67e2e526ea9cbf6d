#include "jumprl/rng.hpp"

#include <cmath>
#include <numbers>

namespace jumprl {

namespace {

constexpr std::uint32_t kMulA = 0xD2511F53u;
constexpr std::uint32_t kMulB = 0xCD9E8D57u;
constexpr std::uint32_t kWeylA = 0x9E3779B9u;
constexpr std::uint32_t kWeylB = 0xBB67AE85u;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& lo, std::uint32_t& hi) {
    const std::uint64_t p = std::uint64_t{a} * b;
    lo = static_cast<std::uint32_t>(p);
    hi = static_cast<std::uint32_t>(p >> 32);
}

inline PhiloxBlock round(const PhiloxBlock& c, const PhiloxKey& k) {
    std::uint32_t lo0, hi0, lo1, hi1;
    mulhilo(kMulA, c[0], lo0, hi0);
    mulhilo(kMulB, c[2], lo1, hi1);
    return {hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0};
}

}  // namespace

PhiloxBlock philox4x32_10(PhiloxBlock counter, PhiloxKey key) noexcept {
    for (int r = 0; r < 10; ++r) {
        if (r > 0) {
            key[0] += kWeylA;
            key[1] += kWeylB;
        }
        counter = round(counter, key);
    }
    return counter;
}

std::uint64_t splitmix64(std::uint64_t x) noexcept {
    std::uint64_t z = x + 0x9E3779B97F4A7C15ull;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

CounterRng::CounterRng(std::uint64_t master_seed, std::uint64_t episode,
                       std::uint64_t path) noexcept {
    std::uint64_t h = splitmix64(master_seed);
    h = splitmix64(h ^ episode);
    h = splitmix64(h ^ (path * 0xD1B54A32D192ED03ull));
    key_ = {static_cast<std::uint32_t>(h), static_cast<std::uint32_t>(h >> 32)};
}

PhiloxBlock CounterRng::block(std::uint64_t step, Lane lane) const noexcept {
    const PhiloxBlock ctr{static_cast<std::uint32_t>(step), static_cast<std::uint32_t>(step >> 32),
                          static_cast<std::uint32_t>(lane), 0u};
    return philox4x32_10(ctr, key_);
}

double CounterRng::uniform(std::uint64_t step, Lane lane) const noexcept {
    const auto b = block(step, lane);
    return to_open_unit((std::uint64_t{b[1]} << 32) | b[0]);
}

double CounterRng::normal(std::uint64_t step, Lane lane) const noexcept {
    const auto b = block(step, lane);
    const double u1 = to_open_unit((std::uint64_t{b[1]} << 32) | b[0]);
    const double u2 = to_open_unit((std::uint64_t{b[3]} << 32) | b[2]);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

}  // namespace jumprl
