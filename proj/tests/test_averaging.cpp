#include <gtest/gtest.h>

#include "oracles.hpp"
#include "vbma/averaging.hpp"
#include "vbma/vbem.hpp"

using namespace vbma;

TEST(Track, ValidatesRange) {
  EXPECT_THROW(PosteriorTrack({0.5, 1.2}, "x"), Error);
  EXPECT_THROW(PosteriorTrack({NAN}, "x"), Error);
  const PosteriorTrack t({1.0 + 1e-12, -1e-12}, "x");
  EXPECT_EQ(t[0], 1.0);
  EXPECT_EQ(t[1], 0.0);
}

TEST(Averaging, UnitMassReturnsModelTrack) {
  auto rng = make_rng(30);
  const auto d = oracle::simulate_binary(rng, 50, 0.2, 0.3, 0.0, 1.0, 3.0, 1.0);
  std::vector<FitResult> fits;
  for (int m = 1; m <= 3; ++m) fits.push_back(fit(d.x, m, NullDensity(0, 1), PriorSpec::defaults(m), {}));
  const auto t = averaged_posterior(fits, WeightVector::unit(1, WeightKind::VB, {1, 2, 3}));
  const auto want = model_track(fits[1]);
  for (std::size_t i = 0; i < t.size(); ++i) EXPECT_DOUBLE_EQ(t[i], want[i]);
  for (std::size_t i = 0; i < t.size(); ++i) EXPECT_NEAR(want[i], 1.0 - fits[1].s_marginals[i], 1e-15);
  EXPECT_EQ(want.source(), "m=2");
}

TEST(Averaging, PointwiseArithmetic) {
  const PosteriorTrack a({0.2, 0.6}, "a"), b({0.8, 0.6}, "b");
  const auto t = averaged_posterior({a, b}, WeightVector({0.5, 0.5}, WeightKind::VB, {1, 2}));
  EXPECT_NEAR(t[0], 0.5, 1e-15);
  EXPECT_NEAR(t[1], 0.6, 1e-15);
  EXPECT_THROW(averaged_posterior({a, PosteriorTrack({0.1}, "c")}, WeightVector({0.5, 0.5}, WeightKind::VB, {1, 2})),
               Error);
  EXPECT_THROW(averaged_posterior({a}, WeightVector({0.5, 0.5}, WeightKind::VB, {1, 2})), Error);
}

TEST(Averaging, ConvexCombinationBounds) {
  auto rng = make_rng(31);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int r = 0; r < 200; ++r) {
    const int M = 1 + r % 7, n = 25;
    std::vector<PosteriorTrack> tracks;
    std::vector<int> ids;
    for (int m = 0; m < M; ++m) {
      std::vector<double> v(n);
      for (auto& x : v) x = u(rng);
      tracks.emplace_back(v, "t");
      ids.push_back(m + 1);
    }
    const WeightVector w(sample_dirichlet(rng, std::vector<double>(static_cast<std::size_t>(M), 0.5)), WeightKind::VB, ids);
    const auto avg = averaged_posterior(tracks, w);
    for (int t = 0; t < n; ++t) {
      double lo = 1, hi = 0;
      for (const auto& tr : tracks) {
        lo = std::min(lo, tr[static_cast<std::size_t>(t)]);
        hi = std::max(hi, tr[static_cast<std::size_t>(t)]);
      }
      EXPECT_GE(avg[static_cast<std::size_t>(t)], lo - 1e-12);
      EXPECT_LE(avg[static_cast<std::size_t>(t)], hi + 1e-12);
    }
  }
}

TEST(Classify, ThresholdAndTies) {
  auto s = classify(PosteriorTrack({0.9, 0.1}, "t"));
  EXPECT_EQ(s.values(), (std::vector<int>{0, 1}));
  s = classify(PosteriorTrack({0.5, 0.5}, "t"), 0.5);
  EXPECT_EQ(s.values(), (std::vector<int>{0, 0}));
  s = classify(PosteriorTrack({0.6, 0.99, 0.9995}, "t"), 0.999);
  EXPECT_EQ(s.values(), (std::vector<int>{1, 1, 0}));
  EXPECT_THROW(classify(PosteriorTrack({0.5}, "t"), 1.0), Error);
  EXPECT_THROW(classify(PosteriorTrack({0.5}, "t"), 0.0), Error);
}

TEST(Classify, InvariantUnderPairedPermutation) {
  const PosteriorTrack a({0.2, 0.7, 0.45}, "a"), b({0.9, 0.3, 0.55}, "b"), c({0.5, 0.5, 0.1}, "c");
  const auto x = classify(averaged_posterior({a, b, c}, WeightVector({0.2, 0.5, 0.3}, WeightKind::VB, {1, 2, 3})));
  const auto y = classify(averaged_posterior({c, a, b}, WeightVector({0.3, 0.2, 0.5}, WeightKind::VB, {3, 1, 2})));
  EXPECT_EQ(x.values(), y.values());
}
