#ifndef VBMA_WEIGHTS_HPP
#define VBMA_WEIGHTS_HPP

#include <cstdint>
#include <span>
#include <vector>

#include "vbma/averaging.hpp"
#include "vbma/vbem.hpp"
#include "vbma/weight_vector.hpp"

namespace vbma {

std::vector<double> uniform_model_prior(std::size_t count);

/// alpha_m proportional to P(m) exp(bound_m), normalized in log space.
WeightVector weights_from_log_scores(std::span<const double> log_scores, std::span<const double> prior_m,
                                     WeightKind kind, std::vector<int> model_ids);

/// Variational weights: P(m) exp(ELBO_m).
WeightVector vb_weights(const std::vector<FitResult>& fits, std::span<const double> prior_m);

/// Plug-in log evidence of one fit:
/// log P(X|theta*) + log P(theta*) - log Q(theta*), theta* the posterior mean.
double plugin_log_evidence(const FitResult& fit, std::span<const double> data);

WeightVector pe_weights(const std::vector<FitResult>& fits, std::span<const double> prior_m,
                        std::span<const double> data);

struct ISConfig {
  int samples = 1000;
  std::uint64_t seed = 0;
};

struct ISEstimate {
  double log_evidence = 0.0;
  double log_se = 0.0;  // Monte-Carlo standard error of log_evidence (delta method)
  double ess = 0.0;     // effective sample size of the importance weights
};

/// Importance-sampling estimate of log P(X|m) with Q^VB as proposal.
/// Z draws come from exact backward sampling of the variational chain.
ISEstimate is_log_evidence(const FitResult& fit, std::span<const double> data, int samples, Rng& rng);

struct ISWeights {
  WeightVector weights;
  std::vector<ISEstimate> per_model;
};

ISWeights is_weights(const std::vector<FitResult>& fits, std::span<const double> prior_m,
                     std::span<const double> data, const ISConfig& cfg);

/// Simplex-constrained least squares: argmin ||truth - sum_m alpha_m track_m||.
/// `model_ids` defaults to 1..M.
WeightVector oracle_weights(const PosteriorTrack& truth, const std::vector<PosteriorTrack>& tracks,
                            std::vector<int> model_ids = {});

/// As above, restricted to the timepoints flagged in `keep`. When nothing is
/// flagged every timepoint is used.
WeightVector oracle_weights(const PosteriorTrack& truth, const std::vector<PosteriorTrack>& tracks,
                            const std::vector<bool>& keep, std::vector<int> model_ids = {});

struct KKTReport {
  double primal = 0.0;        // |sum alpha - 1| + max(-alpha, 0)
  double stationarity = 0.0;  // max over support of |grad_m - nu|
  double dual = 0.0;          // max over off-support of max(nu - grad_m, 0)
  double max() const { return std::max({primal, stationarity, dual}); }
};

/// KKT residuals of alpha for min ||y - A alpha||^2 / 2 on the simplex.
KKTReport simplex_ls_kkt(const Eigen::MatrixXd& design, const Eigen::VectorXd& target,
                         const Eigen::VectorXd& alpha);

Eigen::VectorXd simplex_least_squares(const Eigen::MatrixXd& design, const Eigen::VectorXd& target);

double entropy(const WeightVector& w);
double total_variation(const WeightVector& a, const WeightVector& b);

}  // namespace vbma

#endif  // VBMA_WEIGHTS_HPP
