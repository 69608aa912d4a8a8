#ifndef VBMA_RNG_HPP
#define VBMA_RNG_HPP

#include <cmath>
#include <cstdint>
#include <random>
#include <span>
#include <vector>

namespace vbma {

using Rng = std::mt19937_64;

/// splitmix64 finalizer; used to derive independent streams from a base seed.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z += 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

/// Seed for stream `index` under `seed`, optionally namespaced by `salt`.
constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index, std::uint64_t salt = 0) {
  return mix64(mix64(seed ^ mix64(salt)) + index);
}

inline Rng make_rng(std::uint64_t seed) { return Rng(mix64(seed)); }

inline double sample_gamma(Rng& rng, double shape, double rate) {
  std::gamma_distribution<double> g(shape, 1.0 / rate);
  return g(rng);
}

/// log of a Gamma(shape, rate) draw, exact for shapes far below 1 where the
/// draw itself would underflow.
inline double sample_log_gamma(Rng& rng, double shape, double rate) {
  if (shape >= 1.0) return std::log(sample_gamma(rng, shape, rate));
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  double u = unif(rng);
  while (u <= 0.0) u = unif(rng);
  return std::log(sample_gamma(rng, shape + 1.0, 1.0)) + std::log(u) / shape - std::log(rate);
}

/// Dirichlet draw via normalized gammas. Tiny shapes can underflow every
/// gamma to zero; the draw is then redone in log space.
std::vector<double> sample_dirichlet(Rng& rng, std::span<const double> alpha);

}  // namespace vbma

#endif  // VBMA_RNG_HPP
