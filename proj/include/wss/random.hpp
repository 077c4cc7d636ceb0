#pragma once

#include <cstdint>
#include <random>

namespace wss {

using Rng = std::mt19937_64;

// SplitMix64 finalizer; used to derive decorrelated child seeds.
constexpr std::uint64_t mix_seed(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Named random streams inside one replication. Every consumer that must see
// identical draws across policies (common random numbers) uses the same tag.
enum class Stream : std::uint64_t {
    Occupancy = 1,
    SensingMatrix = 2,
    Policy = 3,
    SlotSignal = 4,
};

constexpr std::uint64_t derive_seed(std::uint64_t parent, std::uint64_t index) {
    return mix_seed(mix_seed(parent) ^ mix_seed(index + 0x51ed270b27a3f2c1ULL));
}

constexpr std::uint64_t derive_seed(std::uint64_t parent, Stream stream, std::uint64_t index = 0) {
    return derive_seed(derive_seed(parent, static_cast<std::uint64_t>(stream)), index);
}

inline double uniform01(Rng& rng) {
    return std::uniform_real_distribution<double>(0.0, 1.0)(rng);
}

} // namespace wss
