#include "vbma/simulation.hpp"

#include <random>

#include "vbma/forward_backward.hpp"
#include "vbma/rng.hpp"

namespace vbma {

void SimulationConfig::validate() const {
  if (n < 1) throw usage_error("simulation: n must be at least 1");
  if (replicates < 1) throw usage_error("simulation: replicates must be at least 1");
  if (!(c >= 1.0) || !std::isfinite(c)) throw usage_error("simulation: c must be at least 1");
  if (!(l > 0.0 && l <= 1.0)) throw usage_error("simulation: shifting rate l must lie in (0, 1]");
  const double a = l * u, b = l * (1.0 - u);
  if (!(a > 0.0 && a < 1.0 && b > 0.0 && b < 1.0)) throw usage_error("simulation: (l, u) gives an invalid Pi_u");
}

TransitionBinary make_pi(double l, double u) {
  if (!(l >= 0.0 && l <= 1.0) || !(u >= 0.0 && u <= 1.0)) throw usage_error("make_pi: l and u must lie in [0, 1]");
  const double a = l * u, b = l * (1.0 - u);
  return {1.0 - a, a, b, 1.0 - b};
}

Dataset sample_dataset(const SimulationConfig& cfg, int replicate) {
  cfg.validate();
  constexpr std::uint64_t kSalt = 0x5111;
  auto rng = make_rng(derive_seed(cfg.seed, static_cast<std::uint64_t>(replicate), kSalt));
  const auto pi = make_pi(cfg.l, cfg.u);
  const auto q = stationary(pi);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::normal_distribution<double> z(0.0, 1.0);

  std::vector<int> s(static_cast<std::size_t>(cfg.n));
  std::vector<double> x(s.size());
  for (std::size_t t = 0; t < s.size(); ++t) {
    const double p_alt = t == 0 ? q[1] : pi(s[t - 1], 1);
    s[t] = unif(rng) < p_alt ? 1 : 0;
    if (s[t] == 0) {
      x[t] = z(rng);
    } else {
      double v = 0.0;
      while (v <= 0.0) v = unif(rng) / cfg.c;
      x[t] = standard_normal_quantile(v);
    }
  }
  return {std::move(x), LabelSequence(std::move(s), 2)};
}

double true_alternative_logpdf(double x, double c) {
  if (!(c >= 1.0)) throw usage_error("alternative: c must be at least 1");
  if (c == 1.0) return normal_logpdf(x, 0.0, 1.0);
  if (x > standard_normal_quantile(1.0 / c)) return kNegInf;
  return std::log(c) + normal_logpdf(x, 0.0, 1.0);
}

std::vector<double> binary_posterior(const std::vector<double>& log_null, const std::vector<double>& log_alt,
                                     const TransitionBinary& pi) {
  if (log_null.size() != log_alt.size() || log_null.empty()) throw usage_error("class log-densities differ in length");
  const auto n = static_cast<Eigen::Index>(log_null.size());
  const auto q = stationary(pi);
  ChainLogWeights w;
  w.init = Eigen::Vector2d(safe_log_prob(q[0]), safe_log_prob(q[1]));
  w.trans.resize(2, 2);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) w.trans(i, j) = safe_log_prob(pi(i, j));
  w.table.resize(n, 2);
  for (Eigen::Index t = 0; t < n; ++t) {
    w.table(t, 0) = log_null[static_cast<std::size_t>(t)];
    w.table(t, 1) = log_alt[static_cast<std::size_t>(t)];
  }
  const auto s = forward_backward_relaxed(w);
  std::vector<double> out(log_null.size());
  for (Eigen::Index t = 0; t < n; ++t) out[static_cast<std::size_t>(t)] = s.marginals(t, 0);
  return out;
}

PosteriorTrack theoretical_posterior(const std::vector<double>& x, const SimulationConfig& cfg) {
  std::vector<double> ln(x.size()), la(x.size());
  for (std::size_t t = 0; t < x.size(); ++t) {
    ln[t] = normal_logpdf(x[t], 0.0, 1.0);
    la[t] = true_alternative_logpdf(x[t], cfg.c);
  }
  return {binary_posterior(ln, la, make_pi(cfg.l, cfg.u)), "theoretical"};
}

}  // namespace vbma
