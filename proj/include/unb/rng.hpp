#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace unb {

using Rng = std::mt19937_64;

/// Deterministic 64-bit seed derived from a base seed and a path of tags.
/// Distinct paths give statistically independent streams.
std::uint64_t derive_seed(std::uint64_t base, std::initializer_list<std::uint64_t> path);

inline Rng make_rng(std::uint64_t base, std::initializer_list<std::uint64_t> path) {
    return Rng(derive_seed(base, path));
}

/// Fresh child stream seeded from the next draw of a parent stream.
inline Rng split_rng(Rng& parent) { return Rng(derive_seed(parent(), {0x5EEDu})); }

}  // namespace unb
