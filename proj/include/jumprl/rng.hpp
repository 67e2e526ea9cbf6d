#pragma once

#include <array>
#include <cstdint>

namespace jumprl {

using PhiloxBlock = std::array<std::uint32_t, 4>;
using PhiloxKey = std::array<std::uint32_t, 2>;

/// Philox4x32 with 10 rounds (Salmon et al., SC'11). Pure function of
/// (counter, key).
PhiloxBlock philox4x32_10(PhiloxBlock counter, PhiloxKey key) noexcept;

/// SplitMix64 output function applied to a single value.
std::uint64_t splitmix64(std::uint64_t x) noexcept;

/// Independent sub-streams drawn from one path's key.
enum class Lane : std::uint32_t {
    Diffusion = 0,
    JumpTime = 1,
    JumpCount = 2,
    Aux = 3,
};

/// Counter-based generator keyed by (master seed, episode, path).
///
/// Every draw is addressed by (step, lane), so the value at a given address
/// never depends on how many other draws were made or in which order. Paths
/// can be simulated in any order or on any thread and stay bit-identical.
class CounterRng {
public:
    CounterRng(std::uint64_t master_seed, std::uint64_t episode, std::uint64_t path) noexcept;

    /// Uniform on the open interval (0, 1).
    double uniform(std::uint64_t step, Lane lane = Lane::Aux) const noexcept;

    /// Standard normal (Box-Muller on one Philox block).
    double normal(std::uint64_t step, Lane lane = Lane::Diffusion) const noexcept;

    PhiloxBlock block(std::uint64_t step, Lane lane) const noexcept;

    std::uint64_t key64() const noexcept {
        return (std::uint64_t{key_[1]} << 32) | key_[0];
    }

private:
    PhiloxKey key_;
};

/// Map a 64-bit word onto (0, 1) with 52 bits of resolution. The half-step
/// offset keeps both ends open: the largest value is 1 - 2^-53.
inline double to_open_unit(std::uint64_t bits) noexcept {
    return (static_cast<double>(bits >> 12) + 0.5) * 0x1.0p-52;
}

}  // namespace jumprl
