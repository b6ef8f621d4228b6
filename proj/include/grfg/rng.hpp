#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace grfg {

// splitmix64; used to derive independent sub-seeds from one master seed.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d4a2fd2f694f5cULL;
    return x ^ (x >> 31);
}

// Stable stream tag so each stochastic concern (split, exploration, replay,
// forest, ...) gets its own generator and never perturbs the others.
inline std::uint64_t derive_seed(std::uint64_t master, std::string_view stream) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : stream) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return splitmix64(master ^ h);
}

using Rng = std::mt19937_64;

inline Rng make_rng(std::uint64_t master, std::string_view stream) {
    return Rng(derive_seed(master, stream));
}

}  // namespace grfg
