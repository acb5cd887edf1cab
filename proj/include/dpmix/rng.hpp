// Reproducible RNG streams. Every parallel task derives its own generator
// from (master seed, purpose, index), so results never depend on worker
// count or scheduling order.
#pragma once

#include <cstdint>
#include <random>

namespace dpmix {

using Rng = std::mt19937_64;

inline uint64_t splitmix64(uint64_t& state) {
  uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

enum class Stream : uint64_t {
  Chain = 1,
  Shell = 2,
  Draw = 3,
  Misc = 4,
};

inline uint64_t derive_seed(uint64_t master, Stream purpose, uint64_t index) {
  uint64_t s = master;
  (void)splitmix64(s);
  s ^= static_cast<uint64_t>(purpose) * 0xd6e8feb86659fd93ULL;
  (void)splitmix64(s);
  s ^= index;
  return splitmix64(s);
}

inline Rng make_rng(uint64_t master, Stream purpose, uint64_t index) {
  return Rng(derive_seed(master, purpose, index));
}

// U(0,1) bounded away from 0 so log(u) is always finite.
inline double runif(Rng& rng) {
  std::uniform_real_distribution<double> d(0.0, 1.0);
  double u = d(rng);
  while (u <= 0.0) u = d(rng);
  return u;
}

inline double rnorm(Rng& rng) {
  std::normal_distribution<double> d(0.0, 1.0);
  return d(rng);
}

}  // namespace dpmix
