#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace lfm {

using Rng = std::mt19937_64;

/// Derives an independent stage seed from a master seed and a fixed label.
/// FNV-1a over the label, mixed with the master seed through splitmix64.
std::uint64_t derive_seed(std::uint64_t master, std::string_view label, std::uint64_t index = 0);

inline std::size_t uniform_index(Rng& rng, std::size_t n) {
    return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng);
}

}  // namespace lfm
