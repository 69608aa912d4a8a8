#ifndef VBMA_FORWARD_BACKWARD_HPP
#define VBMA_FORWARD_BACKWARD_HPP

#include <vector>

#include <Eigen/Dense>

#include "vbma/rng.hpp"

namespace vbma {

/// Log-weights of a K-state chain over n steps. Entries need not be
/// normalized: the chain weight of a path z is
///   init[z_0] + sum_t trans(z_{t-1}, z_t) + sum_t table(t, z_t).
struct ChainLogWeights {
  Eigen::VectorXd init;   // K
  Eigen::MatrixXd trans;  // K x K
  Eigen::MatrixXd table;  // n x K

  Eigen::Index steps() const { return table.rows(); }
  Eigen::Index states() const { return table.cols(); }
};

/// Smoothed quantities of the normalized chain.
struct Smoothed {
  Eigen::MatrixXd marginals;    // n x K, rows sum to 1
  Eigen::MatrixXd pair_counts;  // K x K, sum_t P(z_{t-1}=i, z_t=j)
  double log_normalizer = 0.0;  // log sum_z exp(weight(z))
};

/// Exact smoothing. Rejects NaN and infinite inputs.
Smoothed forward_backward(const ChainLogWeights& w);

/// As `forward_backward`, but -inf entries (impossible states or moves) are
/// allowed as long as some path keeps finite weight.
Smoothed forward_backward_relaxed(const ChainLogWeights& w);

/// Reference implementation carried out entirely with log-sum-exp recursions.
Smoothed forward_backward_log(const ChainLogWeights& w);

/// Log normalizer only (forward pass).
double forward_log_normalizer(const ChainLogWeights& w);

/// Exact draws from the normalized chain by forward filtering and backward
/// sampling. Reuse one sampler for many draws.
class PathSampler {
 public:
  explicit PathSampler(ChainLogWeights w);

  /// Draws a path; returns its log-probability under the normalized chain.
  double sample(Rng& rng, std::vector<int>& path) const;

  double log_normalizer() const noexcept { return log_normalizer_; }

  /// Log-probability of an arbitrary path.
  double log_prob(const std::vector<int>& path) const;

 private:
  ChainLogWeights w_;
  Eigen::MatrixXd filtered_;   // n x K, each row normalized
  Eigen::MatrixXd trans_exp_;  // K x K, exp(trans - rowmax)
  double log_normalizer_ = 0.0;
};

}  // namespace vbma

#endif  // VBMA_FORWARD_BACKWARD_HPP
