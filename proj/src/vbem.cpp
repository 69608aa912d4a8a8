#include "vbma/vbem.hpp"

#include <algorithm>
#include <numeric>
#include <optional>
#include <string>

namespace vbma {

namespace {

void require_positive(double v, const char* what) {
  if (!(v > 0.0) || !std::isfinite(v)) throw usage_error(std::string(what) + " must be positive and finite");
}

void check_data(std::span<const double> data) {
  for (std::size_t t = 0; t < data.size(); ++t)
    if (!std::isfinite(data[t])) throw data_error("observation " + std::to_string(t) + " is not finite");
}

/// Density of (Pi rows, p, lambda, mu) under a product of Dirichlets and a
/// Normal-Gamma with per-component means and scales.
double conjugate_logpdf(const std::array<double, 2>& row0, const std::array<double, 2>& row1,
                        const std::vector<double>& props, double shape, double rate,
                        std::span<const double> means, std::span<const double> scales, const ModelParams& th) {
  const std::array<double, 2> r0{1.0 - th.pi01, th.pi01};
  const std::array<double, 2> r1{th.pi10, 1.0 - th.pi10};
  double out = dirichlet_logpdf(r0, row0) + dirichlet_logpdf(r1, row1) + dirichlet_logpdf(th.props, props) +
               gamma_logpdf(th.precision, shape, rate);
  for (int k = 0; k < th.m(); ++k) {
    const auto i = static_cast<std::size_t>(k);
    out += normal_logpdf_prec(th.means[i], means[i], scales[i] * th.precision);
  }
  return out;
}

std::array<double, 2> mean_pi_stationary(const VariationalPosterior& q) {
  const double pi01 = q.dir_row0[1] / (q.dir_row0[0] + q.dir_row0[1]);
  const double pi10 = q.dir_row1[0] / (q.dir_row1[0] + q.dir_row1[1]);
  return stationary(TransitionBinary(1.0 - pi01, pi01, pi10, 1.0 - pi10));
}

std::array<double, 2> initial_law_for(const InitialLaw& law, const VariationalPosterior& q) {
  if (law.kind == InitialLaw::Kind::Fixed) return {law.fixed_q0, 1.0 - law.fixed_q0};
  return mean_pi_stationary(q);
}

ExpectedCounts counts_from_independent(const Eigen::MatrixXd& resp) {
  const auto n = resp.rows(), K = resp.cols();
  Smoothed s;
  s.marginals = resp;
  s.pair_counts = Eigen::MatrixXd::Zero(K, K);
  for (Eigen::Index t = 1; t < n; ++t) s.pair_counts.noalias() += resp.row(t - 1).transpose() * resp.row(t);
  return ExpectedCounts::from_smoothed(s);
}

struct EStep {
  Smoothed smoothed;
  double elbo = 0.0;
};

EStep e_step(const VariationalPosterior& q, const PriorSpec& prior, std::span<const double> data,
             const NullDensity& null, std::array<double, 2> q_hat) {
  const auto e = expected_log_params(q);
  EStep out{forward_backward(expected_chain_weights(e, data, null, q_hat)), 0.0};
  out.elbo = elbo(prior, q, out.smoothed.log_normalizer);
  return out;
}

/// Refresh of the Z_1 law: accepted only when it does not lower the bound
/// for the current Q(Z).
std::array<double, 2> refresh_initial_law(const InitialLaw& law, const VariationalPosterior& q,
                                          std::array<double, 2> current, double resp_first_null) {
  if (law.kind == InitialLaw::Kind::Fixed) return current;
  const auto cand = mean_pi_stationary(q);
  const double gain = resp_first_null * (safe_log_prob(cand[0]) - safe_log_prob(current[0])) +
                      (1.0 - resp_first_null) * (safe_log_prob(cand[1]) - safe_log_prob(current[1]));
  return gain >= 0.0 ? cand : current;
}

}  // namespace

PriorSpec PriorSpec::defaults(int m) {
  if (m < 1) throw usage_error("model needs at least one alternative component");
  PriorSpec p;
  p.dir_props.assign(static_cast<std::size_t>(m), 1.0);
  return p;
}

void PriorSpec::validate() const {
  if (dir_props.empty()) throw usage_error("prior: dir_props must have one entry per component");
  for (double a : dir_row0) require_positive(a, "prior dir_row0");
  for (double a : dir_row1) require_positive(a, "prior dir_row1");
  for (double a : dir_props) require_positive(a, "prior dir_props");
  require_positive(gamma_shape, "prior gamma_shape");
  require_positive(gamma_rate, "prior gamma_rate");
  require_positive(ng_scale, "prior ng_scale");
  if (!std::isfinite(ng_mean)) throw usage_error("prior ng_mean must be finite");
}

void VariationalPosterior::validate() const {
  if (dir_props.empty() || ng_means.size() != dir_props.size() || ng_scales.size() != dir_props.size())
    throw numeric_error("posterior: inconsistent component count");
  for (double a : dir_row0) require_positive(a, "posterior dir_row0");
  for (double a : dir_row1) require_positive(a, "posterior dir_row1");
  for (double a : dir_props) require_positive(a, "posterior dir_props");
  for (double a : ng_scales) require_positive(a, "posterior ng_scales");
  require_positive(gamma_shape, "posterior gamma_shape");
  require_positive(gamma_rate, "posterior gamma_rate");
}

ExpectedCounts ExpectedCounts::empty(std::size_t n, int m) {
  ExpectedCounts c;
  c.col.assign(static_cast<std::size_t>(m), 0.0);
  c.resp = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n), m + 1);
  c.resp.col(0).setOnes();
  return c;
}

ExpectedCounts ExpectedCounts::from_smoothed(const Smoothed& s) {
  const auto K = s.marginals.cols();
  const auto m = K - 1;
  if (m < 1) throw usage_error("expected counts need at least two states");
  ExpectedCounts c;
  const auto& P = s.pair_counts;
  c.n00 = P(0, 0);
  c.n0plus = P.row(0).tail(m).sum();
  c.nplus0 = P.col(0).tail(m).sum();
  c.nplusplus = P.bottomRightCorner(m, m).sum();
  c.col.resize(static_cast<std::size_t>(m));
  for (Eigen::Index j = 1; j < K; ++j) c.col[static_cast<std::size_t>(j - 1)] = P.col(j).sum() + s.marginals(0, j);
  c.resp = s.marginals;
  return c;
}

void ExpectedCounts::validate() const {
  const auto n = resp.rows();
  for (Eigen::Index t = 0; t < n; ++t)
    if (std::abs(resp.row(t).sum() - 1.0) > 1e-10) throw numeric_error("responsibility row does not sum to 1");
  const double total = n00 + n0plus + nplus0 + nplusplus;
  if (std::abs(total - static_cast<double>(n - 1)) > 1e-8)
    throw numeric_error("expected transition counts do not sum to n - 1");
}

double ExpectedLogParams::expected_log_density(double x, int k) const {
  const auto i = static_cast<std::size_t>(k - 1);
  const double d = x - means[i];
  return 0.5 * (log_precision_mean - kLog2Pi) - 0.5 * (precision_mean * d * d + inv_scales[i]);
}

Eigen::MatrixXd ExpectedLogParams::log_transitions() const {
  const int K = m() + 1;
  Eigen::MatrixXd L(K, K);
  L(0, 0) = log_pi00;
  for (int k = 1; k < K; ++k) L(k, 0) = log_pi10;
  for (int j = 1; j < K; ++j) {
    const double lp = log_props[static_cast<std::size_t>(j - 1)];
    L(0, j) = log_pi01 + lp;
    for (int k = 1; k < K; ++k) L(k, j) = log_pi11 + lp;
  }
  return L;
}

ExpectedLogParams expected_log_params(const VariationalPosterior& q) {
  ExpectedLogParams e;
  const double s0 = digamma(q.dir_row0[0] + q.dir_row0[1]);
  const double s1 = digamma(q.dir_row1[0] + q.dir_row1[1]);
  e.log_pi00 = digamma(q.dir_row0[0]) - s0;
  e.log_pi01 = digamma(q.dir_row0[1]) - s0;
  e.log_pi10 = digamma(q.dir_row1[0]) - s1;
  e.log_pi11 = digamma(q.dir_row1[1]) - s1;
  const double sp = digamma(std::accumulate(q.dir_props.begin(), q.dir_props.end(), 0.0));
  e.log_props.reserve(q.dir_props.size());
  for (double d : q.dir_props) e.log_props.push_back(digamma(d) - sp);
  e.precision_mean = q.gamma_shape / q.gamma_rate;
  e.log_precision_mean = digamma(q.gamma_shape) - std::log(q.gamma_rate);
  e.means = q.ng_means;
  e.inv_scales.reserve(q.ng_scales.size());
  for (double b : q.ng_scales) e.inv_scales.push_back(1.0 / b);
  return e;
}

ChainLogWeights expected_chain_weights(const ExpectedLogParams& e, std::span<const double> data,
                                       const NullDensity& null, std::array<double, 2> q_hat) {
  const int m = e.m();
  const auto n = static_cast<Eigen::Index>(data.size());
  ChainLogWeights w;
  w.init.resize(m + 1);
  w.init(0) = safe_log_prob(q_hat[0]);
  for (int k = 1; k <= m; ++k) w.init(k) = safe_log_prob(q_hat[1]) + e.log_props[static_cast<std::size_t>(k - 1)];
  w.trans = e.log_transitions();
  w.table.resize(n, m + 1);
  for (Eigen::Index t = 0; t < n; ++t) {
    const double x = data[static_cast<std::size_t>(t)];
    w.table(t, 0) = null.logpdf(x);
    for (int k = 1; k <= m; ++k) w.table(t, k) = e.expected_log_density(x, k);
  }
  return w;
}

ChainLogWeights model_chain_weights(const ModelParams& th, std::span<const double> data, const NullDensity& null,
                                    const InitialLaw& law) {
  const int m = th.m();
  const auto n = static_cast<Eigen::Index>(data.size());
  std::array<double, 2> q{law.fixed_q0, 1.0 - law.fixed_q0};
  if (law.kind == InitialLaw::Kind::Stationary) {
    const double s = th.pi01 + th.pi10;
    q = s > 0.0 ? std::array<double, 2>{th.pi10 / s, th.pi01 / s} : std::array<double, 2>{0.5, 0.5};
  }
  std::vector<double> lp(th.props.size());
  for (std::size_t k = 0; k < lp.size(); ++k) lp[k] = safe_log_prob(th.props[k]);
  if (m == 1) lp[0] = 0.0;

  ChainLogWeights w;
  w.init.resize(m + 1);
  w.init(0) = safe_log_prob(q[0]);
  for (int k = 1; k <= m; ++k) w.init(k) = safe_log_prob(q[1]) + lp[static_cast<std::size_t>(k - 1)];
  const double l00 = safe_log_prob(1.0 - th.pi01), l01 = safe_log_prob(th.pi01);
  const double l10 = safe_log_prob(th.pi10), l11 = safe_log_prob(1.0 - th.pi10);
  w.trans.resize(m + 1, m + 1);
  w.trans(0, 0) = l00;
  for (int k = 1; k <= m; ++k) w.trans(k, 0) = l10;
  for (int j = 1; j <= m; ++j) {
    w.trans(0, j) = l01 + lp[static_cast<std::size_t>(j - 1)];
    for (int k = 1; k <= m; ++k) w.trans(k, j) = l11 + lp[static_cast<std::size_t>(j - 1)];
  }
  w.table.resize(n, m + 1);
  for (Eigen::Index t = 0; t < n; ++t) {
    const double x = data[static_cast<std::size_t>(t)];
    w.table(t, 0) = null.logpdf(x);
    for (int k = 1; k <= m; ++k) w.table(t, k) = normal_logpdf_prec(x, th.means[static_cast<std::size_t>(k - 1)], th.precision);
  }
  return w;
}

VariationalPosterior vb_m_step(const PriorSpec& prior, const ExpectedCounts& counts, std::span<const double> data) {
  if (data.empty()) throw data_error("M-step needs data");
  if (counts.n() != data.size()) throw usage_error("M-step: counts and data differ in length");
  if (counts.m() != prior.m()) throw usage_error("M-step: prior and counts differ in component count");
  const int m = prior.m();
  VariationalPosterior q;
  q.dir_row0 = {prior.dir_row0[0] + counts.n00, prior.dir_row0[1] + counts.n0plus};
  q.dir_row1 = {prior.dir_row1[0] + counts.nplus0, prior.dir_row1[1] + counts.nplusplus};
  q.dir_props.resize(static_cast<std::size_t>(m));
  q.ng_means.resize(static_cast<std::size_t>(m));
  q.ng_scales.resize(static_cast<std::size_t>(m));

  double total_mass = 0.0, spread = 0.0;
  for (int k = 0; k < m; ++k) {
    const auto i = static_cast<std::size_t>(k);
    q.dir_props[i] = prior.dir_props[i] + counts.col[i];
    const auto r = counts.resp.col(k + 1);
    double mass = 0.0, sx = 0.0;
    for (std::size_t t = 0; t < data.size(); ++t) {
      mass += r(static_cast<Eigen::Index>(t));
      sx += r(static_cast<Eigen::Index>(t)) * data[t];
    }
    const double scale = prior.ng_scale + mass;
    q.ng_scales[i] = scale;
    q.ng_means[i] = (prior.ng_scale * prior.ng_mean + sx) / scale;
    if (mass > 0.0) {
      const double xbar = sx / mass;
      double ss = 0.0;
      for (std::size_t t = 0; t < data.size(); ++t) {
        const double d = data[t] - xbar;
        ss += r(static_cast<Eigen::Index>(t)) * d * d;
      }
      const double shift = xbar - prior.ng_mean;
      spread += ss + prior.ng_scale * mass * shift * shift / scale;
    }
    total_mass += mass;
  }
  q.gamma_shape = prior.gamma_shape + 0.5 * total_mass;
  q.gamma_rate = prior.gamma_rate + 0.5 * spread;
  return q;
}

double kl_posterior_prior(const VariationalPosterior& q, const PriorSpec& prior) {
  double kl = dirichlet_kl(q.dir_row0, prior.dir_row0) + dirichlet_kl(q.dir_row1, prior.dir_row1) +
              dirichlet_kl(q.dir_props, prior.dir_props) +
              gamma_kl(q.gamma_shape, q.gamma_rate, prior.gamma_shape, prior.gamma_rate);
  const double lam = q.gamma_shape / q.gamma_rate;
  for (int k = 0; k < q.m(); ++k) {
    const auto i = static_cast<std::size_t>(k);
    const double ratio = prior.ng_scale / q.ng_scales[i];
    const double d = q.ng_means[i] - prior.ng_mean;
    kl += 0.5 * (-std::log(ratio) + ratio + prior.ng_scale * lam * d * d - 1.0);
  }
  return kl;
}

double elbo(const PriorSpec& prior, const VariationalPosterior& q, double log_normalizer) {
  return log_normalizer - kl_posterior_prior(q, prior);
}

ModelParams posterior_mean(const VariationalPosterior& q) {
  ModelParams th;
  th.pi01 = q.dir_row0[1] / (q.dir_row0[0] + q.dir_row0[1]);
  th.pi10 = q.dir_row1[0] / (q.dir_row1[0] + q.dir_row1[1]);
  const double total = std::accumulate(q.dir_props.begin(), q.dir_props.end(), 0.0);
  for (double d : q.dir_props) th.props.push_back(d / total);
  th.precision = q.gamma_shape / q.gamma_rate;
  th.means = q.ng_means;
  return th;
}

// Draws below this are floored so that means and densities stay finite.
constexpr double kMinLogPrecision = -600.0;

ModelParams sample_params(const VariationalPosterior& q, Rng& rng) {
  ModelParams th;
  th.pi01 = sample_dirichlet(rng, q.dir_row0)[1];
  th.pi10 = sample_dirichlet(rng, q.dir_row1)[0];
  th.props = q.m() == 1 ? std::vector<double>{1.0} : sample_dirichlet(rng, q.dir_props);
  th.precision = std::exp(std::max(sample_log_gamma(rng, q.gamma_shape, q.gamma_rate), kMinLogPrecision));
  std::normal_distribution<double> z(0.0, 1.0);
  th.means.resize(q.ng_means.size());
  for (std::size_t k = 0; k < th.means.size(); ++k)
    th.means[k] = q.ng_means[k] + z(rng) / std::sqrt(q.ng_scales[k] * th.precision);
  return th;
}

double log_prior_density(const PriorSpec& prior, const ModelParams& th) {
  const std::vector<double> means(static_cast<std::size_t>(th.m()), prior.ng_mean);
  const std::vector<double> scales(static_cast<std::size_t>(th.m()), prior.ng_scale);
  return conjugate_logpdf(prior.dir_row0, prior.dir_row1, prior.dir_props, prior.gamma_shape, prior.gamma_rate,
                          means, scales, th);
}

double log_variational_density(const VariationalPosterior& q, const ModelParams& th) {
  return conjugate_logpdf(q.dir_row0, q.dir_row1, q.dir_props, q.gamma_shape, q.gamma_rate, q.ng_means,
                          q.ng_scales, th);
}

double log_complete_data(const ModelParams& th, std::span<const double> data, const NullDensity& null,
                         const InitialLaw& law, const std::vector<int>& path) {
  if (path.size() != data.size()) throw usage_error("path and data differ in length");
  const int m = th.m();
  std::array<double, 2> q{law.fixed_q0, 1.0 - law.fixed_q0};
  if (law.kind == InitialLaw::Kind::Stationary) {
    const double s = th.pi01 + th.pi10;
    q = s > 0.0 ? std::array<double, 2>{th.pi10 / s, th.pi01 / s} : std::array<double, 2>{0.5, 0.5};
  }
  const double l00 = safe_log_prob(1.0 - th.pi01), l01 = safe_log_prob(th.pi01);
  const double l10 = safe_log_prob(th.pi10), l11 = safe_log_prob(1.0 - th.pi10);
  auto log_prop = [&](int k) { return m == 1 ? 0.0 : safe_log_prob(th.props[static_cast<std::size_t>(k - 1)]); };
  auto emit = [&](std::size_t t, int k) {
    return k == 0 ? null.logpdf(data[t]) : normal_logpdf_prec(data[t], th.means[static_cast<std::size_t>(k - 1)], th.precision);
  };
  double out = path[0] == 0 ? safe_log_prob(q[0]) : safe_log_prob(q[1]) + log_prop(path[0]);
  out += emit(0, path[0]);
  for (std::size_t t = 1; t < path.size(); ++t) {
    const int a = path[t - 1], b = path[t];
    if (a == 0)
      out += b == 0 ? l00 : l01 + log_prop(b);
    else
      out += b == 0 ? l10 : l11 + log_prop(b);
    out += emit(t, b);
  }
  return out;
}

void FitResult::validate() const {
  for (std::size_t i = 1; i < elbo_trace.size(); ++i)
    if (elbo_trace[i] < elbo_trace[i - 1] - 1e-8) throw numeric_error("ELBO decreased during VBEM");
  for (std::size_t t = 0; t < s_marginals.size(); ++t) {
    const double s = counts.resp.row(static_cast<Eigen::Index>(t)).tail(m).sum();
    if (std::abs(s - s_marginals[t]) > 1e-12) throw numeric_error("s_marginals disagree with responsibilities");
  }
  posterior.validate();
}

Eigen::MatrixXd initial_responsibilities(std::span<const double> data, int m, const NullDensity& null, int restart,
                                         Rng& rng) {
  const auto n = data.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  // Least null-likely first.
  std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return null.logpdf(data[a]) < null.logpdf(data[b]); });

  std::uniform_real_distribution<double> unif(0.0, 1.0);
  const double fraction = restart == 0 ? 0.3 : 0.05 + 0.55 * unif(rng);
  const std::size_t n_alt = std::clamp<std::size_t>(static_cast<std::size_t>(std::lround(fraction * n)),
                                                    std::min<std::size_t>(n, 1), n);

  std::vector<std::size_t> alt(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_alt));
  std::stable_sort(alt.begin(), alt.end(), [&](auto a, auto b) { return data[a] < data[b]; });

  // Quantile cut points; jittered away from equal-count bins on restarts.
  std::vector<double> cuts(static_cast<std::size_t>(m - 1));
  for (int k = 1; k < m; ++k) cuts[static_cast<std::size_t>(k - 1)] = static_cast<double>(k) / m;
  if (restart > 0) {
    for (auto& c : cuts) c = unif(rng);
    std::sort(cuts.begin(), cuts.end());
  }

  constexpr double kSmoothing = 0.1;
  const int K = m + 1;
  Eigen::MatrixXd resp = Eigen::MatrixXd::Constant(static_cast<Eigen::Index>(n), K, kSmoothing / K);
  for (std::size_t t = 0; t < n; ++t) resp(static_cast<Eigen::Index>(t), 0) += 1.0 - kSmoothing;
  for (std::size_t r = 0; r < alt.size(); ++r) {
    const double pos = (static_cast<double>(r) + 0.5) / static_cast<double>(alt.size());
    const int bin = 1 + static_cast<int>(std::upper_bound(cuts.begin(), cuts.end(), pos) - cuts.begin());
    const auto t = static_cast<Eigen::Index>(alt[r]);
    resp(t, 0) -= 1.0 - kSmoothing;
    resp(t, bin) += 1.0 - kSmoothing;
  }
  return resp;
}

FitResult run_vbem(std::span<const double> data, int m, const NullDensity& null, const PriorSpec& prior,
                   const VBEMConfig& cfg, const Eigen::MatrixXd& init_resp) {
  if (m < 1) throw usage_error("model needs at least one alternative component");
  if (data.size() < 2) throw data_error("VBEM needs at least two observations");
  check_data(data);
  prior.validate();
  if (prior.m() != m) throw usage_error("prior component count differs from m");
  if (init_resp.rows() != static_cast<Eigen::Index>(data.size()) || init_resp.cols() != m + 1)
    throw usage_error("initial responsibilities have the wrong shape");
  if (cfg.max_iter < 1) throw usage_error("max_iter must be at least 1");

  auto q = vb_m_step(prior, counts_from_independent(init_resp), data);
  auto q_hat = initial_law_for(cfg.initial_law, q);

  FitResult r;
  r.m = m;
  r.null = null;
  r.prior = prior;
  r.config = cfg;

  EStep e;
  for (int it = 0; it < cfg.max_iter; ++it) {
    e = e_step(q, prior, data, null, q_hat);
    r.elbo_trace.push_back(e.elbo);
    r.iterations = it + 1;
    const auto len = r.elbo_trace.size();
    if (len >= 2) {
      const double prev = r.elbo_trace[len - 2];
      if (std::abs(e.elbo - prev) <= cfg.tol * std::max(std::abs(prev), 1e-300)) {
        r.converged = true;
        break;
      }
    }
    if (it + 1 == cfg.max_iter) break;
    const auto counts = ExpectedCounts::from_smoothed(e.smoothed);
    q = vb_m_step(prior, counts, data);
    q_hat = refresh_initial_law(cfg.initial_law, q, q_hat, e.smoothed.marginals(0, 0));
  }
  if (!std::isfinite(e.elbo)) throw numeric_error("VBEM produced a non-finite ELBO");

  r.posterior = q;
  r.counts = ExpectedCounts::from_smoothed(e.smoothed);
  r.log_evidence_bound = e.elbo;
  r.initial_law = q_hat;
  const auto mean = posterior_mean(q);
  r.point_alt = mean.alternative();
  r.point_pi = mean.pi();
  r.s_marginals.resize(data.size());
  for (std::size_t t = 0; t < data.size(); ++t)
    r.s_marginals[t] = r.counts.resp.row(static_cast<Eigen::Index>(t)).tail(m).sum();
  return r;
}

FitResult fit(std::span<const double> data, int m, const NullDensity& null, const PriorSpec& prior,
              const VBEMConfig& cfg) {
  if (m < 1) throw usage_error("model needs at least one alternative component");
  if (cfg.restarts < 1) throw usage_error("restarts must be at least 1");
  if (data.size() < 2) throw data_error("VBEM needs at least two observations");
  check_data(data);
  std::optional<FitResult> best;
  for (int r = 0; r < cfg.restarts; ++r) {
    auto rng = make_rng(derive_seed(cfg.seed, static_cast<std::uint64_t>(r), static_cast<std::uint64_t>(m)));
    const auto init = initial_responsibilities(data, m, null, r, rng);
    auto res = run_vbem(data, m, null, prior, cfg, init);
    res.restart = r;
    if (!best || res.log_evidence_bound > best->log_evidence_bound) best = std::move(res);
  }
  canonicalize(*best);
  return std::move(*best);
}

void canonicalize(FitResult& r) {
  const int m = r.m;
  std::vector<int> order(static_cast<std::size_t>(m));
  std::iota(order.begin(), order.end(), 0);
  const auto& mu = r.posterior.ng_means;
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return mu[static_cast<std::size_t>(a)] < mu[static_cast<std::size_t>(b)]; });
  auto permute = [&](std::vector<double>& v) {
    std::vector<double> out(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) out[i] = v[static_cast<std::size_t>(order[i])];
    v = std::move(out);
  };
  permute(r.posterior.dir_props);
  permute(r.posterior.ng_means);
  permute(r.posterior.ng_scales);
  permute(r.counts.col);
  Eigen::MatrixXd resp = r.counts.resp;
  for (int k = 0; k < m; ++k) resp.col(k + 1) = r.counts.resp.col(order[static_cast<std::size_t>(k)] + 1);
  r.counts.resp = std::move(resp);
}

double elbo_after_extra_pass(const FitResult& r, std::span<const double> data) {
  const auto q = vb_m_step(r.prior, r.counts, data);
  const auto q_hat = refresh_initial_law(r.config.initial_law, q, r.initial_law, r.counts.resp(0, 0));
  return e_step(q, r.prior, data, r.null, q_hat).elbo;
}

}  // namespace vbma
