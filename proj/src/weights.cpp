#include "vbma/weights.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace vbma {

std::string_view to_string(WeightKind kind) {
  switch (kind) {
    case WeightKind::VB: return "VB";
    case WeightKind::PE: return "PE";
    case WeightKind::IS: return "IS";
    case WeightKind::ORACLE: return "ORACLE";
  }
  return "?";
}

WeightKind weight_kind_from_string(std::string_view s) {
  if (s == "VB" || s == "vb") return WeightKind::VB;
  if (s == "PE" || s == "pe") return WeightKind::PE;
  if (s == "IS" || s == "is") return WeightKind::IS;
  if (s == "ORACLE" || s == "oracle") return WeightKind::ORACLE;
  throw usage_error("unknown weight kind: " + std::string(s));
}

WeightVector::WeightVector(std::vector<double> values, WeightKind kind, std::vector<int> model_ids)
    : values_(std::move(values)), kind_(kind), model_ids_(std::move(model_ids)) {
  if (values_.empty()) throw usage_error("weight vector is empty");
  if (model_ids_.size() != values_.size()) throw usage_error("weight vector and model ids differ in length");
  double total = 0.0;
  for (double v : values_) {
    if (!(v >= 0.0) || !std::isfinite(v)) throw numeric_error("weights must be finite and nonnegative");
    total += v;
  }
  if (std::abs(total - 1.0) > kSumTolerance) throw numeric_error("weights must sum to 1");
}

WeightVector WeightVector::unit(std::size_t index, WeightKind kind, std::vector<int> model_ids) {
  std::vector<double> v(model_ids.size(), 0.0);
  v.at(index) = 1.0;
  return {std::move(v), kind, std::move(model_ids)};
}

std::size_t WeightVector::argmax() const {
  return static_cast<std::size_t>(std::max_element(values_.begin(), values_.end()) - values_.begin());
}

std::vector<double> uniform_model_prior(std::size_t count) {
  return std::vector<double>(count, 1.0 / static_cast<double>(count));
}

namespace {

std::vector<int> ids_of(const std::vector<FitResult>& fits) {
  std::vector<int> ids;
  ids.reserve(fits.size());
  for (const auto& f : fits) ids.push_back(f.m);
  return ids;
}

void check_model_prior(std::span<const double> prior_m, std::size_t count) {
  if (prior_m.size() != count) throw usage_error("model prior has the wrong length");
  double total = 0.0;
  for (double p : prior_m) {
    if (!(p >= 0.0)) throw usage_error("model prior must be nonnegative");
    total += p;
  }
  if (std::abs(total - 1.0) > 1e-10) throw usage_error("model prior must sum to 1");
}

}  // namespace

WeightVector weights_from_log_scores(std::span<const double> log_scores, std::span<const double> prior_m,
                                     WeightKind kind, std::vector<int> model_ids) {
  check_model_prior(prior_m, log_scores.size());
  std::vector<double> lw(log_scores.size());
  for (std::size_t i = 0; i < lw.size(); ++i) {
    if (!std::isfinite(log_scores[i])) throw numeric_error("non-finite model score for model " + std::to_string(i));
    lw[i] = prior_m[i] > 0.0 ? std::log(prior_m[i]) + log_scores[i] : kNegInf;
  }
  const double lse = log_sum_exp(lw);
  std::vector<double> w(lw.size());
  for (std::size_t i = 0; i < lw.size(); ++i) w[i] = std::exp(lw[i] - lse);
  const double total = std::accumulate(w.begin(), w.end(), 0.0);
  for (double& v : w) v /= total;
  return {std::move(w), kind, std::move(model_ids)};
}

WeightVector vb_weights(const std::vector<FitResult>& fits, std::span<const double> prior_m) {
  std::vector<double> bounds;
  for (const auto& f : fits) bounds.push_back(f.log_evidence_bound);
  return weights_from_log_scores(bounds, prior_m, WeightKind::VB, ids_of(fits));
}

double plugin_log_evidence(const FitResult& fit, std::span<const double> data) {
  const auto theta = posterior_mean(fit.posterior);
  const double loglik = forward_log_normalizer(model_chain_weights(theta, data, fit.null, fit.config.initial_law));
  const double lp = log_prior_density(fit.prior, theta);
  const double lq = log_variational_density(fit.posterior, theta);
  if (!std::isfinite(lp) || !std::isfinite(lq)) throw numeric_error("posterior mean lies outside the prior support");
  return loglik + lp - lq;
}

WeightVector pe_weights(const std::vector<FitResult>& fits, std::span<const double> prior_m,
                        std::span<const double> data) {
  std::vector<double> scores;
  for (const auto& f : fits) scores.push_back(plugin_log_evidence(f, data));
  return weights_from_log_scores(scores, prior_m, WeightKind::PE, ids_of(fits));
}

ISEstimate is_log_evidence(const FitResult& fit, std::span<const double> data, int samples, Rng& rng) {
  if (samples < 1) throw usage_error("importance sampling needs at least one sample");
  if (fit.n() != data.size()) throw usage_error("fit and data differ in length");
  const PathSampler sampler(
      expected_chain_weights(expected_log_params(fit.posterior), data, fit.null, fit.initial_law));
  std::vector<double> lw(static_cast<std::size_t>(samples));
  std::vector<int> path;
  for (int b = 0; b < samples; ++b) {
    const auto theta = sample_params(fit.posterior, rng);
    const double log_qz = sampler.sample(rng, path);
    const double log_joint = log_complete_data(theta, data, fit.null, fit.config.initial_law, path) +
                             log_prior_density(fit.prior, theta);
    const double log_q = log_qz + log_variational_density(fit.posterior, theta);
    const double v = log_joint - log_q;
    if (std::isnan(v) || v == std::numeric_limits<double>::infinity() || !std::isfinite(log_q))
      throw numeric_error("importance sampling: draw " + std::to_string(b) + " of model m=" + std::to_string(fit.m) +
                          " has zero proposal density or undefined weight (log target " + std::to_string(log_joint) +
                          ", log proposal " + std::to_string(log_q) + ")");
    lw[static_cast<std::size_t>(b)] = v;
  }
  const double lse = log_sum_exp(lw);
  if (!std::isfinite(lse))
    throw numeric_error("importance sampling: every draw of model m=" + std::to_string(fit.m) + " has zero weight");
  ISEstimate est;
  est.log_evidence = lse - std::log(static_cast<double>(samples));
  const double hi = *std::max_element(lw.begin(), lw.end());
  double s1 = 0.0, s2 = 0.0;
  for (double v : lw) {
    const double w = std::exp(v - hi);
    s1 += w;
    s2 += w * w;
  }
  const double B = static_cast<double>(samples);
  const double mean = s1 / B;
  const double var = samples > 1 ? std::max(s2 / B - mean * mean, 0.0) * B / (B - 1.0) : 0.0;
  est.log_se = std::sqrt(var / B) / mean;
  est.ess = s1 * s1 / s2;
  return est;
}

ISWeights is_weights(const std::vector<FitResult>& fits, std::span<const double> prior_m,
                     std::span<const double> data, const ISConfig& cfg) {
  if (cfg.samples < 1) throw usage_error("importance sampling needs at least one sample");
  constexpr std::uint64_t kSalt = 0x15;
  std::vector<ISEstimate> per;
  std::vector<double> scores;
  for (std::size_t i = 0; i < fits.size(); ++i) {
    auto rng = make_rng(derive_seed(cfg.seed, static_cast<std::uint64_t>(fits[i].m), kSalt));
    per.push_back(is_log_evidence(fits[i], data, cfg.samples, rng));
    scores.push_back(per.back().log_evidence);
  }
  return {weights_from_log_scores(scores, prior_m, WeightKind::IS, ids_of(fits)), std::move(per)};
}

// ---------------------------------------------------------------------------
// Simplex-constrained least squares.

namespace {

double ls_objective(const Eigen::MatrixXd& A, const Eigen::VectorXd& y, const Eigen::VectorXd& a) {
  return 0.5 * (y - A * a).squaredNorm();
}

Eigen::VectorXd project_to_simplex(const Eigen::VectorXd& v) {
  std::vector<double> u(v.data(), v.data() + v.size());
  std::sort(u.begin(), u.end(), std::greater<>());
  double css = 0.0, theta = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    css += u[i];
    const double t = (css - 1.0) / static_cast<double>(i + 1);
    if (u[i] - t > 0.0) theta = t;
  }
  return (v.array() - theta).max(0.0).matrix();
}

Eigen::VectorXd simplex_ls_projected(const Eigen::MatrixXd& A, const Eigen::VectorXd& y) {
  const auto M = A.cols();
  const Eigen::MatrixXd G = A.transpose() * A;
  const Eigen::VectorXd b = A.transpose() * y;
  const double L = std::max(G.selfadjointView<Eigen::Lower>().eigenvalues().maxCoeff(), 1e-300);
  Eigen::VectorXd x = Eigen::VectorXd::Constant(M, 1.0 / static_cast<double>(M)), z = x;
  double t = 1.0;
  for (int it = 0; it < 200000; ++it) {
    const Eigen::VectorXd next = project_to_simplex(z - (G * z - b) / L);
    const double tn = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
    z = next + ((t - 1.0) / tn) * (next - x);
    if ((next - x).lpNorm<Eigen::Infinity>() < 1e-15) {
      x = next;
      break;
    }
    x = next;
    t = tn;
  }
  return x;
}

}  // namespace

Eigen::VectorXd simplex_least_squares(const Eigen::MatrixXd& A, const Eigen::VectorXd& y) {
  const auto M = A.cols();
  if (M < 1) throw usage_error("simplex least squares needs at least one column");
  if (A.rows() != y.size()) throw usage_error("design and target differ in length");
  if (A.cwiseAbs().maxCoeff() == 0.0) throw numeric_error("oracle regression: design is identically zero");
  if (M > 16) return simplex_ls_projected(A, y);

  // Each support's equality-constrained solution is a candidate; the optimum
  // is the best feasible one.
  const Eigen::MatrixXd G = A.transpose() * A;
  const Eigen::VectorXd b = A.transpose() * y;
  Eigen::VectorXd best = Eigen::VectorXd::Zero(M);
  double best_obj = std::numeric_limits<double>::infinity();
  for (unsigned mask = 1; mask < (1u << M); ++mask) {
    std::vector<Eigen::Index> idx;
    for (Eigen::Index j = 0; j < M; ++j)
      if (mask & (1u << j)) idx.push_back(j);
    const auto s = static_cast<Eigen::Index>(idx.size());
    Eigen::MatrixXd K = Eigen::MatrixXd::Zero(s + 1, s + 1);
    Eigen::VectorXd rhs(s + 1);
    for (Eigen::Index i = 0; i < s; ++i) {
      for (Eigen::Index j = 0; j < s; ++j) K(i, j) = G(idx[i], idx[j]);
      K(i, s) = K(s, i) = 1.0;
      rhs(i) = b(idx[i]);
    }
    rhs(s) = 1.0;
    const Eigen::VectorXd sol = K.completeOrthogonalDecomposition().solve(rhs);
    Eigen::VectorXd a = Eigen::VectorXd::Zero(M);
    bool feasible = true;
    for (Eigen::Index i = 0; i < s; ++i) {
      if (sol(i) < -1e-12) feasible = false;
      a(idx[i]) = std::max(sol(i), 0.0);
    }
    if (!feasible || !(a.sum() > 0.0)) continue;
    a /= a.sum();
    const double obj = ls_objective(A, y, a);
    if (obj < best_obj - 1e-15) {
      best_obj = obj;
      best = a;
    }
  }
  if (!std::isfinite(best_obj)) return simplex_ls_projected(A, y);
  return best;
}

KKTReport simplex_ls_kkt(const Eigen::MatrixXd& A, const Eigen::VectorXd& y, const Eigen::VectorXd& a) {
  KKTReport r;
  r.primal = std::abs(a.sum() - 1.0) + std::max(-a.minCoeff(), 0.0);
  const Eigen::VectorXd g = A.transpose() * (A * a - y);
  constexpr double kSupport = 1e-12;
  double nu = 0.0;
  int count = 0;
  for (Eigen::Index j = 0; j < a.size(); ++j)
    if (a(j) > kSupport) {
      nu -= g(j);
      ++count;
    }
  if (count > 0) nu /= count;
  for (Eigen::Index j = 0; j < a.size(); ++j) {
    if (a(j) > kSupport)
      r.stationarity = std::max(r.stationarity, std::abs(g(j) + nu));
    else
      r.dual = std::max(r.dual, std::max(-(g(j) + nu), 0.0));
  }
  return r;
}

WeightVector oracle_weights(const PosteriorTrack& truth, const std::vector<PosteriorTrack>& tracks,
                            std::vector<int> model_ids) {
  return oracle_weights(truth, tracks, std::vector<bool>(truth.size(), true), std::move(model_ids));
}

WeightVector oracle_weights(const PosteriorTrack& truth, const std::vector<PosteriorTrack>& tracks,
                            const std::vector<bool>& keep, std::vector<int> model_ids) {
  if (tracks.empty()) throw usage_error("oracle weights need at least one model track");
  if (keep.size() != truth.size()) throw usage_error("mask and truth differ in length");
  for (const auto& t : tracks)
    if (t.size() != truth.size()) throw usage_error("model track and truth differ in length");
  if (model_ids.empty()) {
    model_ids.resize(tracks.size());
    std::iota(model_ids.begin(), model_ids.end(), 1);
  }
  std::vector<std::size_t> rows;
  for (std::size_t t = 0; t < keep.size(); ++t)
    if (keep[t]) rows.push_back(t);
  if (rows.empty()) {
    rows.resize(truth.size());
    std::iota(rows.begin(), rows.end(), 0);
  }
  Eigen::MatrixXd A(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(tracks.size()));
  Eigen::VectorXd y(static_cast<Eigen::Index>(rows.size()));
  for (std::size_t r = 0; r < rows.size(); ++r) {
    y(static_cast<Eigen::Index>(r)) = truth[rows[r]];
    for (std::size_t m = 0; m < tracks.size(); ++m)
      A(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(m)) = tracks[m][rows[r]];
  }
  const auto a = simplex_least_squares(A, y);
  std::vector<double> w(a.data(), a.data() + a.size());
  const double total = std::accumulate(w.begin(), w.end(), 0.0);
  for (double& v : w) v /= total;
  return {std::move(w), WeightKind::ORACLE, std::move(model_ids)};
}

double entropy(const WeightVector& w) {
  double h = 0.0;
  for (double v : w.values())
    if (v > 0.0) h -= v * std::log(v);
  return std::max(h, 0.0);
}

double total_variation(const WeightVector& a, const WeightVector& b) {
  if (a.model_ids() != b.model_ids()) throw usage_error("total variation needs matching model collections");
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) d += std::abs(a[i] - b[i]);
  return std::min(0.5 * d, 1.0);
}

}  // namespace vbma
