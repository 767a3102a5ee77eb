#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace semra {

using Rng = std::mt19937_64;

namespace rng {

// SplitMix64 finaliser; used to decorrelate derived seeds.
constexpr std::uint64_t mix(std::uint64_t x) noexcept {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

constexpr std::uint64_t fnv1a(std::string_view s) noexcept {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

// Named sub-stream of a master seed, e.g. derive(seed, "env").
constexpr std::uint64_t derive(std::uint64_t seed, std::string_view name) noexcept {
    return mix(seed ^ mix(fnv1a(name)));
}

constexpr std::uint64_t derive(std::uint64_t seed, std::uint64_t index) noexcept {
    return mix(seed ^ mix(index + 0x632be59bd9b4e019ULL));
}

inline Rng make(std::uint64_t seed, std::string_view name) { return Rng(derive(seed, name)); }

}  // namespace rng
}  // namespace semra
