#ifndef MSLAB_RANDOM_HPP
#define MSLAB_RANDOM_HPP

#include <cstdint>
#include <random>
#include <string_view>

namespace mslab {

// Substream derivation. Every stochastic component draws from
//   std::mt19937_64(derive_seed(root, label, i, j))
// where derive_seed folds the FNV-1a hash of `label` and the indices into the
// root seed through splitmix64. Uniform and normal variates are produced from
// the raw 64-bit engine output (not std::*_distribution), so sequences are
// identical across standard libraries.
std::uint64_t splitmix64(std::uint64_t x);
std::uint64_t derive_seed(std::uint64_t root, std::string_view label, std::uint64_t i = 0,
                          std::uint64_t j = 0);

using Engine = std::mt19937_64;

// Uniform on [0, 1) with 53 random bits.
double uniform01(Engine& eng);
// Standard normal via Box-Muller (one variate per call, no caching).
double standard_normal(Engine& eng);
// Uniform integer on [0, n).
std::uint64_t uniform_index(Engine& eng, std::uint64_t n);

}  // namespace mslab

#endif  // MSLAB_RANDOM_HPP
