#include "vbma/forward_backward.hpp"

#include <cmath>
#include <string>

#include "vbma/common.hpp"

namespace vbma {

namespace {

void check_shapes(const ChainLogWeights& w) {
  const auto K = w.states();
  if (K < 1) throw usage_error("chain needs at least one state");
  if (w.steps() < 1) throw usage_error("chain needs at least one step");
  if (w.init.size() != K || w.trans.rows() != K || w.trans.cols() != K)
    throw usage_error("chain log-weights have inconsistent dimensions");
}

template <typename Derived>
void check_values(const Eigen::DenseBase<Derived>& m, bool allow_neg_inf, const char* what) {
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      const double v = m(i, j);
      if (std::isnan(v) || v == std::numeric_limits<double>::infinity() || (!allow_neg_inf && v == kNegInf))
        throw numeric_error(std::string("forward-backward: non-finite entry in ") + what);
    }
}

void check_inputs(const ChainLogWeights& w, bool allow_neg_inf) {
  check_shapes(w);
  check_values(w.init, allow_neg_inf, "initial weights");
  check_values(w.trans, allow_neg_inf, "transition weights");
  check_values(w.table, allow_neg_inf, "emission table");
}

// Scaled recursions: probabilities are kept normalized per step and the
// discarded scale is accumulated in log space.
struct ScaledForward {
  Eigen::MatrixXd alpha;  // normalized filtered law
  Eigen::MatrixXd emis;   // exp(table - rowmax)
  Eigen::MatrixXd A;      // exp(trans - max)
  Eigen::VectorXd scale;  // per-step normalizers of the shifted recursion
  double log_normalizer = 0.0;
  bool ok = true;
};

ScaledForward scaled_forward(const ChainLogWeights& w) {
  const auto n = w.steps(), K = w.states();
  ScaledForward f;
  f.alpha.resize(n, K);
  f.emis.resize(n, K);
  f.scale.resize(n);

  const double tmax = w.trans.maxCoeff();
  if (!std::isfinite(tmax)) {
    if (n > 1) {
      f.ok = false;
      return f;
    }
  }
  if (n > 1)
    f.A = (w.trans.array() - tmax).exp().matrix();
  else
    f.A = Eigen::MatrixXd::Zero(K, K);

  for (Eigen::Index t = 0; t < n; ++t) {
    const double rmax = w.table.row(t).maxCoeff();
    if (!std::isfinite(rmax)) {
      f.ok = false;
      return f;
    }
    f.emis.row(t) = (w.table.row(t).array() - rmax).exp();
  }

  Eigen::RowVectorXd a0 = w.init.transpose() + w.table.row(0);
  const double amax = a0.maxCoeff();
  if (!std::isfinite(amax)) {
    f.ok = false;
    return f;
  }
  a0 = (a0.array() - amax).exp();
  double c = a0.sum();
  f.scale(0) = c;
  f.alpha.row(0) = a0 / c;
  f.log_normalizer = amax + std::log(c);

  for (Eigen::Index t = 1; t < n; ++t) {
    Eigen::RowVectorXd next = (f.alpha.row(t - 1) * f.A).cwiseProduct(f.emis.row(t));
    c = next.sum();
    if (!(c > 0.0) || !std::isfinite(c)) {
      f.ok = false;
      return f;
    }
    f.scale(t) = c;
    f.alpha.row(t) = next / c;
    f.log_normalizer += std::log(c) + tmax + w.table.row(t).maxCoeff();
  }
  return f;
}

Smoothed scaled_smooth(const ChainLogWeights& w, const ScaledForward& f) {
  const auto n = w.steps(), K = w.states();
  Smoothed s;
  s.log_normalizer = f.log_normalizer;
  s.marginals.resize(n, K);
  s.pair_counts = Eigen::MatrixXd::Zero(K, K);

  Eigen::RowVectorXd beta = Eigen::RowVectorXd::Ones(K);
  s.marginals.row(n - 1) = f.alpha.row(n - 1);
  for (Eigen::Index t = n - 1; t >= 1; --t) {
    const Eigen::RowVectorXd eb = f.emis.row(t).cwiseProduct(beta) / f.scale(t);
    // xi(i, j) = alpha_{t-1}(i) A(i, j) e_t(j) beta_t(j) / c_t
    s.pair_counts.noalias() +=
        (f.alpha.row(t - 1).transpose().asDiagonal() * f.A) * eb.asDiagonal();
    beta = (f.A * eb.transpose()).transpose();
    Eigen::RowVectorXd g = f.alpha.row(t - 1).cwiseProduct(beta);
    s.marginals.row(t - 1) = g / g.sum();
  }
  return s;
}

}  // namespace

Smoothed forward_backward_log(const ChainLogWeights& w) {
  check_shapes(w);
  const auto n = w.steps(), K = w.states();
  Eigen::MatrixXd la(n, K), lb(n, K);
  std::vector<double> buf(static_cast<std::size_t>(K));

  for (Eigen::Index k = 0; k < K; ++k) la(0, k) = w.init(k) + w.table(0, k);
  for (Eigen::Index t = 1; t < n; ++t)
    for (Eigen::Index j = 0; j < K; ++j) {
      for (Eigen::Index i = 0; i < K; ++i) buf[static_cast<std::size_t>(i)] = la(t - 1, i) + w.trans(i, j);
      la(t, j) = log_sum_exp(buf) + w.table(t, j);
    }
  for (Eigen::Index k = 0; k < K; ++k) lb(n - 1, k) = 0.0;
  for (Eigen::Index t = n - 2; t >= 0; --t)
    for (Eigen::Index i = 0; i < K; ++i) {
      for (Eigen::Index j = 0; j < K; ++j)
        buf[static_cast<std::size_t>(j)] = w.trans(i, j) + w.table(t + 1, j) + lb(t + 1, j);
      lb(t, i) = log_sum_exp(buf);
    }

  for (Eigen::Index k = 0; k < K; ++k) buf[static_cast<std::size_t>(k)] = la(n - 1, k);
  Smoothed s;
  s.log_normalizer = log_sum_exp(buf);
  if (!std::isfinite(s.log_normalizer)) throw numeric_error("forward-backward: every path has zero weight");
  s.marginals = ((la + lb).array() - s.log_normalizer).exp();
  s.pair_counts = Eigen::MatrixXd::Zero(K, K);
  for (Eigen::Index t = 1; t < n; ++t)
    for (Eigen::Index i = 0; i < K; ++i)
      for (Eigen::Index j = 0; j < K; ++j)
        s.pair_counts(i, j) +=
            std::exp(la(t - 1, i) + w.trans(i, j) + w.table(t, j) + lb(t, j) - s.log_normalizer);
  return s;
}

Smoothed forward_backward(const ChainLogWeights& w) {
  check_inputs(w, false);
  const auto f = scaled_forward(w);
  if (!f.ok) return forward_backward_log(w);
  return scaled_smooth(w, f);
}

Smoothed forward_backward_relaxed(const ChainLogWeights& w) {
  check_inputs(w, true);
  const auto f = scaled_forward(w);
  if (!f.ok) return forward_backward_log(w);
  return scaled_smooth(w, f);
}

double forward_log_normalizer(const ChainLogWeights& w) {
  check_inputs(w, true);
  const auto f = scaled_forward(w);
  if (!f.ok) return forward_backward_log(w).log_normalizer;
  return f.log_normalizer;
}

PathSampler::PathSampler(ChainLogWeights w) : w_(std::move(w)) {
  check_inputs(w_, true);
  auto f = scaled_forward(w_);
  if (!f.ok) throw numeric_error("path sampler: chain weights under- or overflow");
  filtered_ = std::move(f.alpha);
  trans_exp_ = std::move(f.A);
  log_normalizer_ = f.log_normalizer;
}

namespace {

int draw_index(Rng& rng, const Eigen::RowVectorXd& weights) {
  const double total = weights.sum();
  std::uniform_real_distribution<double> unif(0.0, total);
  const double u = unif(rng);
  double acc = 0.0;
  const auto K = weights.size();
  for (Eigen::Index k = 0; k < K; ++k) {
    acc += weights(k);
    if (u < acc) return static_cast<int>(k);
  }
  for (Eigen::Index k = K - 1; k >= 0; --k)
    if (weights(k) > 0.0) return static_cast<int>(k);
  return static_cast<int>(K - 1);
}

}  // namespace

double PathSampler::sample(Rng& rng, std::vector<int>& path) const {
  const auto n = w_.steps();
  path.resize(static_cast<std::size_t>(n));
  path[static_cast<std::size_t>(n - 1)] = draw_index(rng, filtered_.row(n - 1));
  for (Eigen::Index t = n - 2; t >= 0; --t) {
    const int next = path[static_cast<std::size_t>(t + 1)];
    Eigen::RowVectorXd wts = filtered_.row(t).cwiseProduct(trans_exp_.col(next).transpose());
    path[static_cast<std::size_t>(t)] = draw_index(rng, wts);
  }
  return log_prob(path);
}

double PathSampler::log_prob(const std::vector<int>& path) const {
  double lw = w_.init(path[0]) + w_.table(0, path[0]);
  for (std::size_t t = 1; t < path.size(); ++t) {
    const auto ti = static_cast<Eigen::Index>(t);
    lw += w_.trans(path[t - 1], path[t]) + w_.table(ti, path[t]);
  }
  return lw - log_normalizer_;
}

}  // namespace vbma
