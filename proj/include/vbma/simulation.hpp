#ifndef VBMA_SIMULATION_HPP
#define VBMA_SIMULATION_HPP

#include <cstdint>
#include <vector>

#include "vbma/averaging.hpp"
#include "vbma/model.hpp"

namespace vbma {

/// Two-class generator: null N(0,1); alternative Phi^{-1}(U), U ~ Uniform(0, 1/c);
/// labels follow Pi_u = ((1 - l u, l u), (l (1 - u), 1 - l (1 - u))).
struct SimulationConfig {
  int n = 100;
  int replicates = 100;
  double c = 5.0;
  double u = 0.05;
  double l = 0.6;
  std::uint64_t seed = 0;

  void validate() const;
};

TransitionBinary make_pi(double l, double u);

struct Dataset {
  std::vector<double> x;
  LabelSequence s;
};

/// Replicate `replicate` of the design; its stream is derived from (seed, replicate).
Dataset sample_dataset(const SimulationConfig& cfg, int replicate = 0);

/// log c + log phi(x) for x <= Phi^{-1}(1/c), -inf beyond.
double true_alternative_logpdf(double x, double c);

/// Exact P(S_t = 0 | X) under the generating law.
PosteriorTrack theoretical_posterior(const std::vector<double>& x, const SimulationConfig& cfg);

/// Exact P(S_t = 0 | X) for a binary HMM with arbitrary class log-densities.
std::vector<double> binary_posterior(const std::vector<double>& log_null, const std::vector<double>& log_alt,
                                     const TransitionBinary& pi);

}  // namespace vbma

#endif  // VBMA_SIMULATION_HPP
