#include <gtest/gtest.h>

#include <map>

#include "oracles.hpp"
#include "vbma/forward_backward.hpp"

using namespace vbma;

namespace {

void expect_matches(const Smoothed& got, const Smoothed& want, double tol) {
  EXPECT_NEAR(got.log_normalizer, want.log_normalizer, tol);
  ASSERT_EQ(got.marginals.rows(), want.marginals.rows());
  EXPECT_LE((got.marginals - want.marginals).cwiseAbs().maxCoeff(), tol);
  EXPECT_LE((got.pair_counts - want.pair_counts).cwiseAbs().maxCoeff(), tol);
}

}  // namespace

TEST(ForwardBackward, MatchesEnumerationOnRandomChains) {
  auto rng = make_rng(2024);
  for (int rep = 0; rep < 150; ++rep) {
    const int n = 1 + rep % 8;
    const int K = 2 + rep % 2;
    const auto w = oracle::random_chain(rng, n, K);
    const auto want = oracle::enumerate(w);
    expect_matches(forward_backward(w), want, 1e-10);
    expect_matches(forward_backward_log(w), want, 1e-10);
    expect_matches(forward_backward_relaxed(w), want, 1e-10);
    EXPECT_NEAR(forward_log_normalizer(w), want.log_normalizer, 1e-10);
  }
}

TEST(ForwardBackward, SingleStep) {
  ChainLogWeights w;
  w.init = Eigen::Vector2d(std::log(0.25), std::log(0.75));
  w.trans = Eigen::Matrix2d::Zero();
  w.table = Eigen::RowVector2d(std::log(2.0), 0.0);
  const auto s = forward_backward(w);
  EXPECT_NEAR(s.marginals(0, 0), 0.5 / 1.25, 1e-15);
  EXPECT_NEAR(s.log_normalizer, std::log(1.25), 1e-15);
  EXPECT_EQ(s.pair_counts.sum(), 0.0);
}

TEST(ForwardBackward, UniformInputsGiveUniformMarginals) {
  ChainLogWeights w;
  w.init = Eigen::VectorXd::Zero(3);
  w.trans = Eigen::MatrixXd::Zero(3, 3);
  w.table = Eigen::MatrixXd::Constant(7, 3, -1.3);
  const auto s = forward_backward(w);
  EXPECT_LE((s.marginals.array() - 1.0 / 3.0).abs().maxCoeff(), 1e-14);
  EXPECT_NEAR(s.pair_counts.sum(), 6.0, 1e-12);
}

TEST(ForwardBackward, StrictVersionRejectsNonFinite) {
  auto rng = make_rng(1);
  auto w = oracle::random_chain(rng, 4, 2);
  w.table(2, 1) = std::nan("");
  EXPECT_THROW(forward_backward(w), Error);
  EXPECT_THROW(forward_backward_relaxed(w), Error);
  w.table(2, 1) = -INFINITY;
  EXPECT_THROW(forward_backward(w), Error);
}

TEST(ForwardBackward, RelaxedVersionHandlesImpossibleStates) {
  auto rng = make_rng(8);
  for (int rep = 0; rep < 50; ++rep) {
    auto w = oracle::random_chain(rng, 6, 2);
    for (int t = 0; t < 6; ++t)
      if ((t + rep) % 3 == 0) w.table(t, 1) = -INFINITY;
    if (rep % 2) w.trans(1, 1) = -INFINITY;
    expect_matches(forward_backward_relaxed(w), oracle::enumerate(w), 1e-10);
  }
  ChainLogWeights dead;
  dead.init = Eigen::Vector2d(0.0, 0.0);
  dead.trans = Eigen::Matrix2d::Zero();
  dead.table = Eigen::MatrixXd::Constant(3, 2, -INFINITY);
  EXPECT_THROW(forward_backward_relaxed(dead), Error);
}

TEST(ForwardBackward, LongChainsAgreeWithLogSpaceReference) {
  auto rng = make_rng(77);
  const auto w = oracle::random_chain(rng, 3000, 4, 5.0);
  const auto a = forward_backward(w);
  const auto b = forward_backward_log(w);
  EXPECT_NEAR(a.log_normalizer, b.log_normalizer, 1e-9 * std::abs(b.log_normalizer));
  EXPECT_LE((a.marginals - b.marginals).cwiseAbs().maxCoeff(), 1e-9);
  EXPECT_LE((a.pair_counts - b.pair_counts).cwiseAbs().maxCoeff(), 1e-7);
}

TEST(PathSampler, LogProbMatchesEnumeration) {
  auto rng = make_rng(9);
  const auto w = oracle::random_chain(rng, 5, 3);
  const PathSampler sampler(w);
  const double z = oracle::enumerate(w).log_normalizer;
  EXPECT_NEAR(sampler.log_normalizer(), z, 1e-10);
  oracle::for_each_path(5, 3, [&](const std::vector<int>& p) {
    EXPECT_NEAR(sampler.log_prob(p), oracle::path_weight(w, p) - z, 1e-10);
  });
}

TEST(PathSampler, DrawFrequenciesMatchPathProbabilities) {
  auto rng = make_rng(10);
  const auto w = oracle::random_chain(rng, 3, 2, 1.0);
  const PathSampler sampler(w);
  const double z = sampler.log_normalizer();
  std::map<std::vector<int>, int> counts;
  const int draws = 200000;
  std::vector<int> path;
  for (int b = 0; b < draws; ++b) {
    const double lp = sampler.sample(rng, path);
    EXPECT_NEAR(lp, oracle::path_weight(w, path) - z, 1e-10);
    ++counts[path];
  }
  oracle::for_each_path(3, 2, [&](const std::vector<int>& p) {
    const double prob = std::exp(oracle::path_weight(w, p) - z);
    const double se = std::sqrt(prob * (1 - prob) / draws);
    EXPECT_NEAR(counts[p] / static_cast<double>(draws), prob, 5 * se + 1e-12);
  });
}
