#include <gtest/gtest.h>

#include <boost/math/distributions/normal.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "oracles.hpp"
#include "vbma/simulation.hpp"

using namespace vbma;

TEST(MakePi, Examples) {
  const auto p = make_pi(0.6, 0.2);
  EXPECT_NEAR(p.pi00(), 0.88, 1e-15);
  EXPECT_NEAR(p.pi01(), 0.12, 1e-15);
  EXPECT_NEAR(p.pi10(), 0.48, 1e-15);
  EXPECT_NEAR(p.pi11(), 0.52, 1e-15);
  const auto id = make_pi(0.0, 0.3);
  EXPECT_EQ(id.pi00(), 1.0);
  EXPECT_EQ(id.pi11(), 1.0);
  const auto half = make_pi(1.0, 0.5);
  EXPECT_EQ(half.pi00(), 0.5);
  EXPECT_EQ(half.pi10(), 0.5);
  EXPECT_THROW(make_pi(1.2, 0.5), Error);
  EXPECT_THROW(make_pi(0.5, 1.5), Error);
}

TEST(MakePi, StationaryLawIsU) {
  auto rng = make_rng(40);
  std::uniform_real_distribution<double> d(0.01, 0.99);
  for (int r = 0; r < 300; ++r) {
    const double l = d(rng), u = d(rng);
    const auto q = stationary(make_pi(l, u));
    EXPECT_NEAR(q[0], 1 - u, 1e-12);
    EXPECT_NEAR(q[1], u, 1e-12);
  }
}

TEST(Config, Validation) {
  SimulationConfig c;
  EXPECT_NO_THROW(c.validate());
  c.c = 0.5;
  EXPECT_THROW(c.validate(), Error);
  c = {};
  c.l = 0.0;
  EXPECT_THROW(c.validate(), Error);
  c = {};
  c.n = 0;
  EXPECT_THROW(c.validate(), Error);
}

TEST(Sample, AlternativeSupportAndReproducibility) {
  SimulationConfig c;
  c.u = 0.3;
  c.seed = 5;
  const double bound = boost::math::quantile(boost::math::normal(), 0.2);
  EXPECT_NEAR(bound, -0.8416, 1e-4);
  for (int r = 0; r < 20; ++r) {
    const auto d = sample_dataset(c, r);
    ASSERT_EQ(d.x.size(), 100u);
    for (std::size_t t = 0; t < d.x.size(); ++t)
      if (d.s[t] == 1) {
        EXPECT_LE(d.x[t], bound);
      }
    const auto again = sample_dataset(c, r);
    EXPECT_EQ(d.x, again.x);
    EXPECT_EQ(d.s.values(), again.s.values());
  }
  EXPECT_NE(sample_dataset(c, 0).x, sample_dataset(c, 1).x);
}

TEST(Sample, UnitCRecoversStandardNormal) {
  SimulationConfig c;
  c.c = 1.0;
  c.u = 0.5;
  c.l = 1.0;
  c.n = 2000;
  double s1 = 0, s2 = 0;
  int k = 0;
  for (int r = 0; r < 5; ++r) {
    const auto d = sample_dataset(c, r);
    for (std::size_t t = 0; t < d.x.size(); ++t)
      if (d.s[t] == 1) {
        s1 += d.x[t];
        s2 += d.x[t] * d.x[t];
        ++k;
      }
  }
  EXPECT_NEAR(s1 / k, 0.0, 4 / std::sqrt(k));
  EXPECT_NEAR(s2 / k, 1.0, 4 * std::sqrt(2.0 / k));
}

TEST(Sample, ClassFrequencyMatchesU) {
  SimulationConfig c;
  c.u = 0.2;
  c.replicates = 2000;
  c.seed = 41;
  int first = 0;
  long all = 0;
  for (int r = 0; r < c.replicates; ++r) {
    const auto d = sample_dataset(c, r);
    first += d.s[0];
    for (int v : d.s.values()) all += v;
  }
  const double P = c.replicates;
  EXPECT_NEAR(first / P, c.u, 3 * std::sqrt(c.u * (1 - c.u) / P));
  // Correlated draws: the lag-one autocorrelation of the chain is 1 - l.
  const double N = P * c.n, rho = 1 - c.l;
  EXPECT_NEAR(all / N, c.u, 3 * std::sqrt(c.u * (1 - c.u) / N * (1 + rho) / (1 - rho)));
}

TEST(TrueAlternative, IntegratesToOne) {
  using boost::math::quadrature::gauss_kronrod;
  for (double c : {1.0, 5.0, 7.0, 10.0, 15.0}) {
    const double top = c > 1.0 ? boost::math::quantile(boost::math::normal(), 1.0 / c) : 40.0;
    const double v = gauss_kronrod<double, 61>::integrate(
        [&](double x) { return std::exp(true_alternative_logpdf(x, c)); }, -40.0, top, 20, 1e-14);
    EXPECT_NEAR(v, 1.0, 1e-10) << "c=" << c;
  }
  EXPECT_EQ(true_alternative_logpdf(0.0, 5.0), -INFINITY);
  EXPECT_NEAR(true_alternative_logpdf(-1.3, 1.0), normal_logpdf(-1.3, 0, 1), 1e-15);
  EXPECT_NEAR(true_alternative_logpdf(-1.3, 5.0), std::log(5.0) + normal_logpdf(-1.3, 0, 1), 1e-15);
}

TEST(Theoretical, IidChainIsPointwiseBayes) {
  SimulationConfig c;
  c.l = 1.0;
  c.u = 0.3;
  c.c = 5.0;
  const auto d = sample_dataset(c, 0);
  const auto t = theoretical_posterior(d.x, c);
  for (std::size_t i = 0; i < d.x.size(); ++i) {
    const double f0 = 0.7 * std::exp(normal_logpdf(d.x[i], 0, 1));
    const double f1 = 0.3 * std::exp(true_alternative_logpdf(d.x[i], 5.0));
    EXPECT_NEAR(t[i], f0 / (f0 + f1), 1e-12);
  }
}

TEST(Theoretical, MatchesEnumeration) {
  auto rng = make_rng(42);
  std::normal_distribution<double> z(-0.5, 1.0);
  for (int r = 0; r < 40; ++r) {
    SimulationConfig c;
    c.c = r % 2 ? 5.0 : 15.0;
    c.u = 0.1 + 0.05 * (r % 5);
    const int n = 1 + r % 8;
    std::vector<double> x(static_cast<std::size_t>(n));
    for (auto& v : x) v = z(rng);
    const auto pi = make_pi(c.l, c.u);
    const auto q = stationary(pi);
    ChainLogWeights w;
    w.init = Eigen::Vector2d(std::log(q[0]), std::log(q[1]));
    w.trans.resize(2, 2);
    w.trans << std::log(pi.pi00()), std::log(pi.pi01()), std::log(pi.pi10()), std::log(pi.pi11());
    w.table.resize(n, 2);
    for (int t = 0; t < n; ++t) {
      w.table(t, 0) = normal_logpdf(x[static_cast<std::size_t>(t)], 0, 1);
      w.table(t, 1) = true_alternative_logpdf(x[static_cast<std::size_t>(t)], c.c);
    }
    const auto want = oracle::enumerate(w);
    const auto got = theoretical_posterior(x, c);
    for (int t = 0; t < n; ++t) EXPECT_NEAR(got[static_cast<std::size_t>(t)], want.marginals(t, 0), 1e-10);
  }
}

TEST(Theoretical, DependsOnTimeOrder) {
  SimulationConfig c;
  c.u = 0.3;
  const std::vector<double> x{-2.0, -1.5, -2.2, 1.0, 1.2};
  const std::vector<double> y{1.0, -1.5, 1.2, -2.0, -2.2};
  const auto a = theoretical_posterior(x, c);
  const auto b = theoretical_posterior(y, c);
  double diff = 0;
  for (std::size_t t = 0; t < x.size(); ++t)
    for (std::size_t s = 0; s < y.size(); ++s)
      if (x[t] == y[s]) diff = std::max(diff, std::abs(a[t] - b[s]));
  EXPECT_GT(diff, 1e-3);
}
