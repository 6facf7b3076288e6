#pragma once

#include <array>
#include <cstdint>

namespace anderson {

// Counter-based generator (Threefry-2x64, 20 rounds). Every output word is a
// pure function of (key, counter), so independent streams are obtained by
// partitioning the counter space instead of jumping a sequential state.
struct Threefry2x64 {
    static constexpr std::uint64_t kParity = 0x1BD11BDAA9FC1A22ULL;

    static constexpr std::uint64_t rotl(std::uint64_t x, unsigned r) noexcept {
        return (x << r) | (x >> (64u - r));
    }

    static std::array<std::uint64_t, 2> block(std::array<std::uint64_t, 2> counter,
                                              std::array<std::uint64_t, 2> key) noexcept {
        constexpr unsigned rot[8] = {16, 42, 12, 31, 16, 32, 24, 21};
        const std::uint64_t ks[3] = {key[0], key[1], kParity ^ key[0] ^ key[1]};
        std::uint64_t x0 = counter[0] + ks[0];
        std::uint64_t x1 = counter[1] + ks[1];
        for (unsigned round = 0; round < 20; ++round) {
            x0 += x1;
            x1 = rotl(x1, rot[round % 8]);
            x1 ^= x0;
            if ((round + 1) % 4 == 0) {
                const std::uint64_t s = (round + 1) / 4;
                x0 += ks[s % 3];
                x1 += ks[(s + 1) % 3] + s;
            }
        }
        return {x0, x1};
    }
};

/// Uniform double in [0, 1) from the top 53 bits of a word.
inline double to_unit_interval(std::uint64_t word) noexcept {
    return static_cast<double>(word >> 11) * 0x1.0p-53;
}

/// Deterministic per-site uniform variate: a function of (seed, realization,
/// site) only, independent of evaluation order and thread count.
inline double site_uniform(std::uint64_t seed, std::uint64_t realization,
                           std::uint64_t site) noexcept {
    const auto out = Threefry2x64::block({realization, site}, {seed, 0x616E6465724C6162ULL});
    return to_unit_interval(out[0]);
}

} // namespace anderson
