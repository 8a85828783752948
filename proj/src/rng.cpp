#include "cropweed/rng.hpp"

namespace cropweed {

uint64_t fnv1a64(const void* data, size_t len, uint64_t seed) {
  const auto* p = static_cast<const unsigned char*>(data);
  uint64_t h = seed;
  for (size_t i = 0; i < len; ++i) {
    h ^= p[i];
    h *= 0x100000001b3ull;
  }
  return h;
}

uint64_t fnv1a64(std::string_view s, uint64_t seed) {
  return fnv1a64(s.data(), s.size(), seed);
}

uint64_t derive_seed(uint64_t seed, std::string_view stream) {
  uint64_t h = fnv1a64(&seed, sizeof(seed));
  return fnv1a64(stream, h);
}

Rng make_rng(uint64_t seed, std::string_view stream) {
  return Rng(derive_seed(seed, stream));
}

uint64_t rand_below(Rng& rng, uint64_t n) {
  // rejection sampling keeps the draw exactly uniform
  uint64_t limit = UINT64_MAX - UINT64_MAX % n;
  uint64_t x;
  do {
    x = rng();
  } while (x >= limit);
  return x % n;
}

double rand_unit(Rng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

double rand_range(Rng& rng, double lo, double hi) {
  return lo + (hi - lo) * rand_unit(rng);
}

}  // namespace cropweed
