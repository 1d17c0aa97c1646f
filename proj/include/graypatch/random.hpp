#pragma once

#include <cstdint>
#include <limits>

namespace graypatch {

/// SplitMix64 finaliser (Stafford's Mix13). A bijection on 64-bit words.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

inline constexpr std::uint64_t golden_gamma = 0x9e3779b97f4a7c15ULL;

/// Counter-based stream: the i-th 64-bit word (from 1) is mix64(key + i * gamma),
/// i.e. the SplitMix64 sequence seeded at `key`. Every draw is a pure
/// function of (key, position), so a stream can be replayed or skipped
/// ahead without generating the prefix. The conversions to reals and
/// bounded integers below are fixed here rather than borrowed from
/// <random> distributions, whose output differs between standard libraries.
class RandomStream {
public:
    constexpr explicit RandomStream(std::uint64_t key, std::uint64_t position = 0) noexcept
        : key_(key), position_(position) {}

    [[nodiscard]] constexpr std::uint64_t key() const noexcept { return key_; }
    /// Number of 64-bit words consumed so far.
    [[nodiscard]] constexpr std::uint64_t position() const noexcept { return position_; }

    constexpr std::uint64_t next_u64() noexcept {
        ++position_;
        return mix64(key_ + position_ * golden_gamma);
    }

    /// Uniform on [0, 1) with 53 bits of resolution.
    constexpr double uniform() noexcept { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    /// Uniform on [lo, hi); returns lo when the interval is degenerate.
    constexpr double uniform(double lo, double hi) noexcept { return lo + (hi - lo) * uniform(); }

    /// Unbiased integer in [0, bound) by Lemire's multiply-and-reject.
    constexpr std::uint64_t uniform_int(std::uint64_t bound) noexcept {
        if (bound <= 1) {
            next_u64();
            return 0;
        }
        const std::uint64_t threshold = (0 - bound) % bound;
        for (;;) {
            const unsigned __int128 m = static_cast<unsigned __int128>(next_u64()) * bound;
            if (static_cast<std::uint64_t>(m) >= threshold) return static_cast<std::uint64_t>(m >> 64);
        }
    }

    friend constexpr bool operator==(const RandomStream&, const RandomStream&) = default;

private:
    std::uint64_t key_;
    std::uint64_t position_;
};

/// Key of the stream owned by dataset entry `ordinal` under `master_seed`.
/// For a fixed seed the map ordinal -> key is injective (xor then a
/// bijection), so no two entries of one run share a stream.
constexpr std::uint64_t stream_key(std::uint64_t master_seed, std::uint64_t ordinal) noexcept {
    return mix64(mix64(master_seed + golden_gamma) ^ ordinal);
}

constexpr RandomStream derive_stream(std::uint64_t master_seed, std::uint64_t ordinal) noexcept {
    return RandomStream(stream_key(master_seed, ordinal));
}

} // namespace graypatch
