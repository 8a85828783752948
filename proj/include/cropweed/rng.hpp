#pragma once

#include <cstdint>
#include <random>
#include <string_view>
#include <vector>

namespace cropweed {

using Rng = std::mt19937_64;

// FNV-1a, 64 bit. Used for seed derivation and artifact content hashes.
uint64_t fnv1a64(const void* data, size_t len, uint64_t seed = 0xcbf29ce484222325ull);
uint64_t fnv1a64(std::string_view s, uint64_t seed = 0xcbf29ce484222325ull);

// Deterministic per-stream engine: same (seed, stream) always yields the
// same sequence, distinct streams are decorrelated.
Rng make_rng(uint64_t seed, std::string_view stream);

// The raw derived value make_rng seeds with; for handing seeds onward.
uint64_t derive_seed(uint64_t seed, std::string_view stream);

// Unbiased draw from [0, n). n must be > 0.
uint64_t rand_below(Rng& rng, uint64_t n);

// Uniform in [0, 1) with 53 bits of resolution.
double rand_unit(Rng& rng);

double rand_range(Rng& rng, double lo, double hi);

// Fisher-Yates. std::shuffle is not pinned by the standard, this is.
template <typename T>
void shuffle_vec(std::vector<T>& v, Rng& rng) {
  for (size_t i = v.size(); i > 1; --i) {
    size_t j = static_cast<size_t>(rand_below(rng, i));
    std::swap(v[i - 1], v[j]);
  }
}

}  // namespace cropweed
