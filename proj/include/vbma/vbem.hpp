#ifndef VBMA_VBEM_HPP
#define VBMA_VBEM_HPP

// Variational Bayes EM for one (m+1)-state model.
//
// Parameters: transition rows (pi00, pi01) and (pi10, pi11), mixture
// proportions p, shared precision lambda and component means mu_k. Priors
// are conjugate:
//   (pi00, pi01) ~ Dir(dir_row0), (pi10, pi11) ~ Dir(dir_row1), p ~ Dir(dir_props),
//   lambda ~ Gamma(gamma_shape, gamma_rate), mu_k | lambda ~ N(ng_mean, 1/(ng_scale lambda)).
// The variational family is Q(Z) Q(Theta); Q(Theta) stays in the prior family.

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "vbma/forward_backward.hpp"
#include "vbma/model.hpp"
#include "vbma/rng.hpp"

namespace vbma {

struct PriorSpec {
  std::array<double, 2> dir_row0{1.0, 1.0};
  std::array<double, 2> dir_row1{1.0, 1.0};
  std::vector<double> dir_props;
  double gamma_shape = 0.01;
  double gamma_rate = 0.01;
  double ng_mean = 0.0;
  double ng_scale = 0.01;

  int m() const noexcept { return static_cast<int>(dir_props.size()); }

  /// Reference prior: Dir(1,1) rows, Dir(1,...,1) proportions,
  /// Gamma(0.01, 0.01) precision, N(0, 1/(0.01 lambda)) means.
  static PriorSpec defaults(int m);

  void validate() const;
};

struct VariationalPosterior {
  std::array<double, 2> dir_row0{};
  std::array<double, 2> dir_row1{};
  std::vector<double> dir_props;
  double gamma_shape = 0.0;
  double gamma_rate = 0.0;
  std::vector<double> ng_means;
  std::vector<double> ng_scales;

  int m() const noexcept { return static_cast<int>(dir_props.size()); }
  void validate() const;
};

struct ExpectedCounts {
  double n00 = 0.0;        // E[N_00]
  double n0plus = 0.0;     // sum_{j>=1} E[N_0j]
  double nplus0 = 0.0;     // sum_{k>=1} E[N_k0]
  double nplusplus = 0.0;  // sum_{k,j>=1} E[N_kj]
  std::vector<double> col; // per component j: sum_k E[N_kj] + E[Z_1j]
  Eigen::MatrixXd resp;    // n x (m+1), Q(Z_t = k)

  int m() const noexcept { return static_cast<int>(col.size()); }
  std::size_t n() const noexcept { return static_cast<std::size_t>(resp.rows()); }

  /// Zero transition counts and responsibilities concentrated on state 0.
  static ExpectedCounts empty(std::size_t n, int m);

  /// Aggregates full smoothed output of the expanded chain.
  static ExpectedCounts from_smoothed(const Smoothed& s);

  void validate() const;
};

/// Initial law of Z_1. Stationary: (q0, q1 p_k) with q the stationary law of
/// Pi. Fixed: (q0, (1 - q0) p_k) for a given q0.
struct InitialLaw {
  enum class Kind { Stationary, Fixed };
  Kind kind = Kind::Stationary;
  double fixed_q0 = 0.5;
};

struct VBEMConfig {
  double tol = 1e-6;
  int max_iter = 500;
  int restarts = 5;
  std::uint64_t seed = 0;
  InitialLaw initial_law{};
};

/// Point values of every parameter, component-indexed (not reordered).
struct ModelParams {
  double pi01 = 0.0;
  double pi10 = 0.0;
  std::vector<double> props;
  double precision = 1.0;
  std::vector<double> means;

  int m() const noexcept { return static_cast<int>(props.size()); }
  TransitionBinary pi() const { return {1.0 - pi01, pi01, pi10, 1.0 - pi10}; }
  MixtureAlternative alternative() const { return {means, precision, props}; }
};

/// E_Q log-parameters used by the E-step.
struct ExpectedLogParams {
  double log_pi00 = 0.0, log_pi01 = 0.0, log_pi10 = 0.0, log_pi11 = 0.0;
  std::vector<double> log_props;
  double precision_mean = 0.0;      // E[lambda]
  double log_precision_mean = 0.0;  // E[log lambda]
  std::vector<double> means;        // ng_means
  std::vector<double> inv_scales;   // 1/ng_scales

  int m() const noexcept { return static_cast<int>(log_props.size()); }

  /// E_Q[log N(x; mu_k, 1/lambda)] for component k in 1..m.
  double expected_log_density(double x, int k) const;

  /// Expanded (m+1)x(m+1) table of E_Q[log Omega_ij].
  Eigen::MatrixXd log_transitions() const;
};

ExpectedLogParams expected_log_params(const VariationalPosterior& q);

/// Chain weights of the E-step. `q_hat` is the initial law of S_1 used in
/// place of the stationary law.
ChainLogWeights expected_chain_weights(const ExpectedLogParams& e, std::span<const double> data,
                                       const NullDensity& null, std::array<double, 2> q_hat);

/// Chain weights of the generative model at fixed parameters; the log
/// normalizer of the result is log P(X | theta, m).
ChainLogWeights model_chain_weights(const ModelParams& theta, std::span<const double> data,
                                    const NullDensity& null, const InitialLaw& law);

VariationalPosterior vb_m_step(const PriorSpec& prior, const ExpectedCounts& counts,
                               std::span<const double> data);

/// KL(Q_Theta || P_Theta) in closed form.
double kl_posterior_prior(const VariationalPosterior& q, const PriorSpec& prior);

/// Evidence lower bound given the log normalizer of the E-step run under `q`.
double elbo(const PriorSpec& prior, const VariationalPosterior& q, double log_normalizer);

ModelParams posterior_mean(const VariationalPosterior& q);
ModelParams sample_params(const VariationalPosterior& q, Rng& rng);
double log_prior_density(const PriorSpec& prior, const ModelParams& theta);
double log_variational_density(const VariationalPosterior& q, const ModelParams& theta);

/// log P(X, Z | theta, m) along one expanded-state path.
double log_complete_data(const ModelParams& theta, std::span<const double> data, const NullDensity& null,
                         const InitialLaw& law, const std::vector<int>& path);

struct FitResult {
  int m = 0;
  NullDensity null{0.0, 1.0};
  PriorSpec prior;
  VBEMConfig config;
  VariationalPosterior posterior;
  ExpectedCounts counts;
  std::vector<double> elbo_trace;
  double log_evidence_bound = 0.0;
  MixtureAlternative point_alt{{0.0}, 1.0, {1.0}};
  TransitionBinary point_pi{0.5, 0.5, 0.5, 0.5};
  std::vector<double> s_marginals;  // Q(S_t = 1)
  std::array<double, 2> initial_law{0.5, 0.5};  // law of S_1 in the final E-step
  bool converged = false;
  int iterations = 0;
  int restart = 0;

  std::size_t n() const noexcept { return s_marginals.size(); }
  void validate() const;
};

/// Initial responsibilities for restart `restart`: points least likely under
/// the null go to the alternative, split into m quantile bins. Restart 0 is
/// deterministic; later restarts jitter the split.
Eigen::MatrixXd initial_responsibilities(std::span<const double> data, int m, const NullDensity& null,
                                         int restart, Rng& rng);

/// VBEM from given initial responsibilities; no restarts.
FitResult run_vbem(std::span<const double> data, int m, const NullDensity& null, const PriorSpec& prior,
                   const VBEMConfig& cfg, const Eigen::MatrixXd& init_resp);

/// Best of cfg.restarts runs by final ELBO. Components of the result are
/// sorted by posterior mean.
FitResult fit(std::span<const double> data, int m, const NullDensity& null, const PriorSpec& prior,
              const VBEMConfig& cfg);

/// Reorders components by posterior mean (posterior, counts, point_alt).
void canonicalize(FitResult& r);

/// One more E-step followed by an M-step and an E-step; returns the ELBO
/// after that pass. Used to check fixed points.
double elbo_after_extra_pass(const FitResult& r, std::span<const double> data);

}  // namespace vbma

#endif  // VBMA_VBEM_HPP
