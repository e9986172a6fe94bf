#pragma once

#include <cstdint>
#include <random>

namespace swing {

/// SplitMix64 finalizer, used to derive independent stream seeds.
inline constexpr std::uint64_t mix_seed(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

/// Seed of stream `index` under a master seed.
inline constexpr std::uint64_t stream_seed(std::uint64_t master, std::uint64_t index) {
    return mix_seed(mix_seed(master) ^ mix_seed(index + 0x632BE59BD9B4E019ULL));
}

using Engine = std::mt19937_64;

}  // namespace swing
