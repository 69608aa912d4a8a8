#ifndef VBMA_TESTS_ORACLES_HPP
#define VBMA_TESTS_ORACLES_HPP

// Brute-force references used only by the test suites. Nothing here calls
// the recursions or conjugate updates under test.

#include <cmath>
#include <functional>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "vbma/common.hpp"
#include "vbma/forward_backward.hpp"
#include "vbma/rng.hpp"
#include "vbma/vbem.hpp"

namespace vbma::oracle {

inline double lse(const std::vector<double>& v) {
  double hi = -INFINITY;
  for (double x : v) hi = std::max(hi, x);
  if (!std::isfinite(hi)) return hi;
  double s = 0.0;
  for (double x : v) s += std::exp(x - hi);
  return hi + std::log(s);
}

/// Calls f(path) for every path in {0..K-1}^n.
inline void for_each_path(int n, int K, const std::function<void(const std::vector<int>&)>& f) {
  std::vector<int> path(static_cast<std::size_t>(n), 0);
  while (true) {
    f(path);
    int i = n - 1;
    while (i >= 0 && ++path[static_cast<std::size_t>(i)] == K) path[static_cast<std::size_t>(i--)] = 0;
    if (i < 0) return;
  }
}

inline double path_weight(const ChainLogWeights& w, const std::vector<int>& z) {
  double s = w.init(z[0]) + w.table(0, z[0]);
  for (std::size_t t = 1; t < z.size(); ++t)
    s += w.trans(z[t - 1], z[t]) + w.table(static_cast<Eigen::Index>(t), z[t]);
  return s;
}

/// Smoothed quantities by exhaustive enumeration.
inline Smoothed enumerate(const ChainLogWeights& w) {
  const int n = static_cast<int>(w.steps()), K = static_cast<int>(w.states());
  std::vector<double> weights;
  std::vector<std::vector<int>> paths;
  for_each_path(n, K, [&](const std::vector<int>& z) {
    weights.push_back(path_weight(w, z));
    paths.push_back(z);
  });
  Smoothed s;
  s.log_normalizer = lse(weights);
  s.marginals = Eigen::MatrixXd::Zero(n, K);
  s.pair_counts = Eigen::MatrixXd::Zero(K, K);
  for (std::size_t p = 0; p < paths.size(); ++p) {
    const double prob = std::exp(weights[p] - s.log_normalizer);
    const auto& z = paths[p];
    for (int t = 0; t < n; ++t) s.marginals(t, z[static_cast<std::size_t>(t)]) += prob;
    for (int t = 1; t < n; ++t) s.pair_counts(z[static_cast<std::size_t>(t - 1)], z[static_cast<std::size_t>(t)]) += prob;
  }
  return s;
}

inline ChainLogWeights random_chain(Rng& rng, int n, int K, double spread = 3.0) {
  std::normal_distribution<double> z(0.0, spread);
  ChainLogWeights w;
  w.init.resize(K);
  w.trans.resize(K, K);
  w.table.resize(n, K);
  for (int i = 0; i < K; ++i) w.init(i) = z(rng);
  for (int i = 0; i < K; ++i)
    for (int j = 0; j < K; ++j) w.trans(i, j) = z(rng);
  for (int t = 0; t < n; ++t)
    for (int k = 0; k < K; ++k) w.table(t, k) = z(rng);
  return w;
}

/// log of the Normal-Gamma marginal likelihood of `xs` under
/// lambda ~ Gamma(a0, b0), mu | lambda ~ N(m0, 1/(beta0 lambda)).
inline double normal_gamma_marginal(const std::vector<double>& xs, double m0, double beta0, double a0, double b0) {
  const double N = static_cast<double>(xs.size());
  if (xs.empty()) return 0.0;
  double sum = 0.0;
  for (double x : xs) sum += x;
  const double xbar = sum / N;
  double ss = 0.0;
  for (double x : xs) ss += (x - xbar) * (x - xbar);
  const double bN = beta0 + N;
  const double aN = a0 + 0.5 * N;
  const double rN = b0 + 0.5 * (ss + beta0 * N * (xbar - m0) * (xbar - m0) / bN);
  return std::lgamma(aN) - std::lgamma(a0) + a0 * std::log(b0) - aN * std::log(rN) + 0.5 * std::log(beta0 / bN) -
         0.5 * N * kLog2Pi;
}

/// Same quantity by 2-D quadrature over (mu, log lambda); validates the closed form.
inline double normal_gamma_marginal_quadrature(const std::vector<double>& xs, double m0, double beta0, double a0,
                                               double b0) {
  using boost::math::quadrature::gauss_kronrod;
  auto inner = [&](double loglam) {
    const double lam = std::exp(loglam);
    auto f = [&](double mu) {
      double lp = 0.5 * (std::log(beta0 * lam) - kLog2Pi) - 0.5 * beta0 * lam * (mu - m0) * (mu - m0);
      for (double x : xs) lp += 0.5 * (std::log(lam) - kLog2Pi) - 0.5 * lam * (x - mu) * (x - mu);
      return std::exp(lp);
    };
    const double sd = 1.0 / std::sqrt(lam * (beta0 + static_cast<double>(xs.size())));
    double center = beta0 * m0;
    for (double x : xs) center += x;
    center /= beta0 + static_cast<double>(xs.size());
    const double v = gauss_kronrod<double, 61>::integrate(f, center - 40 * sd, center + 40 * sd, 15, 1e-12);
    // density of log lambda: Gamma(lam) * lam
    return v * std::exp(a0 * std::log(b0) - std::lgamma(a0) + a0 * loglam - b0 * lam);
  };
  return std::log(gauss_kronrod<double, 61>::integrate(inner, -30.0, 15.0, 15, 1e-12));
}

/// log of the integral over Beta-distributed (pi01, pi10) of
/// q_{s1}(Pi) * prod pi^{N}, where q is the stationary law. Integrated in
/// (r, w) with pi01 = r w, pi10 = r (1 - w), where q1 = w.
inline double stationary_transition_evidence(int s1, const double N[2][2], const std::array<double, 2>& row0,
                                             const std::array<double, 2>& row1) {
  using boost::math::quadrature::gauss_kronrod;
  auto beta_logpdf = [](double x, double a, double b) {
    return std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) + (a - 1) * std::log(x) + (b - 1) * std::log1p(-x);
  };
  auto inner = [&](double w) {
    const double rmax = 1.0 / std::max(w, 1.0 - w);
    auto f = [&](double r) {
      const double p01 = std::min(r * w, 1.0), p10 = std::min(r * (1.0 - w), 1.0);
      if (p01 <= 0.0 || p10 <= 0.0 || p01 >= 1.0 || p10 >= 1.0) return 0.0;
      const double lv = std::log(s1 == 0 ? 1.0 - w : w) + std::log(r) + N[0][0] * std::log1p(-p01) +
                        N[0][1] * std::log(p01) + N[1][0] * std::log(p10) + N[1][1] * std::log1p(-p10) +
                        beta_logpdf(p01, row0[1], row0[0]) + beta_logpdf(p10, row1[0], row1[1]);
      return std::exp(lv);
    };
    return gauss_kronrod<double, 61>::integrate(f, 0.0, rmax, 8, 1e-12);
  };
  const double total = gauss_kronrod<double, 61>::integrate(inner, 0.0, 0.5, 8, 1e-12) +
                       gauss_kronrod<double, 61>::integrate(inner, 0.5, 1.0, 8, 1e-12);
  return std::log(total);
}

inline double log_beta(double a, double b) { return std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b); }

/// Exact log P(X | m = 1) by enumerating the 2^n label paths and integrating
/// the parameters (closed-form conjugate integrals; quadrature for the
/// stationary initial law).
inline double exact_log_evidence_m1(const std::vector<double>& x, const NullDensity& null, const PriorSpec& prior,
                                    const InitialLaw& law) {
  const int n = static_cast<int>(x.size());
  std::vector<double> terms;
  for_each_path(n, 2, [&](const std::vector<int>& z) {
    double N[2][2] = {{0, 0}, {0, 0}};
    for (int t = 1; t < n; ++t) N[z[static_cast<std::size_t>(t - 1)]][z[static_cast<std::size_t>(t)]] += 1;
    std::vector<double> alt;
    double lv = 0.0;
    for (int t = 0; t < n; ++t) {
      if (z[static_cast<std::size_t>(t)] == 1)
        alt.push_back(x[static_cast<std::size_t>(t)]);
      else
        lv += null.logpdf(x[static_cast<std::size_t>(t)]);
    }
    lv += normal_gamma_marginal(alt, prior.ng_mean, prior.ng_scale, prior.gamma_shape, prior.gamma_rate);
    if (law.kind == InitialLaw::Kind::Fixed) {
      lv += std::log(z[0] == 0 ? law.fixed_q0 : 1.0 - law.fixed_q0);
      lv += log_beta(prior.dir_row0[0] + N[0][0], prior.dir_row0[1] + N[0][1]) -
            log_beta(prior.dir_row0[0], prior.dir_row0[1]);
      lv += log_beta(prior.dir_row1[0] + N[1][0], prior.dir_row1[1] + N[1][1]) -
            log_beta(prior.dir_row1[0], prior.dir_row1[1]);
    } else {
      lv += stationary_transition_evidence(z[0], N, prior.dir_row0, prior.dir_row1);
    }
    terms.push_back(lv);
  });
  return lse(terms);
}

/// Binary HMM draws with Gaussian classes, started from the stationary law.
struct BinarySeries {
  std::vector<double> x;
  std::vector<int> s;
};

inline BinarySeries simulate_binary(Rng& rng, int n, double pi01, double pi10, double null_mean, double null_sd,
                                    double alt_mean, double alt_sd) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::normal_distribution<double> z(0.0, 1.0);
  BinarySeries out;
  int s = u(rng) < pi01 / (pi01 + pi10) ? 1 : 0;
  for (int t = 0; t < n; ++t) {
    if (t > 0) s = s == 0 ? (u(rng) < pi01 ? 1 : 0) : (u(rng) < pi10 ? 0 : 1);
    out.s.push_back(s);
    out.x.push_back(s == 0 ? null_mean + null_sd * z(rng) : alt_mean + alt_sd * z(rng));
  }
  return out;
}

}  // namespace vbma::oracle

#endif  // VBMA_TESTS_ORACLES_HPP
