#pragma once

#include <cstdint>

// Counter-based RNG: every variate is a pure hash of (seed, pixel, sample,
// dimension), so any scheduler -- megakernel, wavefront, any thread count --
// reads exactly the same float for the same logical coordinate.

namespace crt
{

inline uint64_t hash_mix64(uint64_t x)
{
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

// Per-(pixel, sample) base key; stored in RayState::rngState.
inline uint64_t rng_base(uint64_t seed, uint32_t pixelId, uint32_t sampleId)
{
  return hash_mix64(seed ^ hash_mix64((uint64_t(sampleId) << 32) | uint64_t(pixelId)));
}

// Dimension indexing: 0,1 = pixel jitter; bounce b uses 2+2b and 3+2b.
inline float rng_float(uint64_t base, uint32_t dim)
{
  const uint64_t h = hash_mix64(base ^ (0xD1B54A32D192ED03ull * (uint64_t(dim) + 1ull)));
  return float(h >> 40) * 0x1.0p-24f;  // 24 mantissa bits in [0,1)
}

} // namespace crt
