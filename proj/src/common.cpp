#include "vbma/common.hpp"

#include <cmath>
#include <numeric>

#include <boost/math/distributions/normal.hpp>
#include <boost/math/special_functions/digamma.hpp>

#include "vbma/rng.hpp"

namespace vbma {

double digamma(double x) { return boost::math::digamma(x); }

double dirichlet_logpdf(std::span<const double> p, std::span<const double> alpha) {
  if (p.size() != alpha.size()) throw numeric_error("dirichlet_logpdf: dimension mismatch");
  if (p.size() <= 1) return 0.0;
  double a0 = 0.0, out = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] <= 0.0) return kNegInf;
    a0 += alpha[i];
    out += (alpha[i] - 1.0) * std::log(p[i]) - std::lgamma(alpha[i]);
  }
  return out + std::lgamma(a0);
}

double gamma_logpdf(double x, double shape, double rate) {
  if (x <= 0.0) return kNegInf;
  return shape * std::log(rate) - std::lgamma(shape) + (shape - 1.0) * std::log(x) - rate * x;
}

double dirichlet_kl(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw numeric_error("dirichlet_kl: dimension mismatch");
  if (a.size() <= 1) return 0.0;
  const double sa = std::accumulate(a.begin(), a.end(), 0.0);
  const double sb = std::accumulate(b.begin(), b.end(), 0.0);
  const double psa = digamma(sa);
  double out = std::lgamma(sa) - std::lgamma(sb);
  for (std::size_t i = 0; i < a.size(); ++i)
    out += std::lgamma(b[i]) - std::lgamma(a[i]) + (a[i] - b[i]) * (digamma(a[i]) - psa);
  return out;
}

double gamma_kl(double a, double b, double a0, double b0) {
  return (a - a0) * digamma(a) - std::lgamma(a) + std::lgamma(a0) + a0 * (std::log(b) - std::log(b0)) +
         a * (b0 - b) / b;
}

double standard_normal_quantile(double p) {
  static const boost::math::normal_distribution<double> z;
  return boost::math::quantile(z, p);
}

double standard_normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

std::vector<double> sample_dirichlet(Rng& rng, std::span<const double> alpha) {
  std::vector<double> g(alpha.size());
  double total = 0.0;
  for (std::size_t i = 0; i < alpha.size(); ++i) {
    g[i] = sample_gamma(rng, alpha[i], 1.0);
    total += g[i];
  }
  if (total > 0.0 && std::isfinite(total)) {
    for (double& v : g) v /= total;
    return g;
  }
  // Gamma(a) = Gamma(a + 1) * U^{1/a}, taken in logs.
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::vector<double> logs(alpha.size());
  for (std::size_t i = 0; i < alpha.size(); ++i) {
    double u = unif(rng);
    while (u <= 0.0) u = unif(rng);
    logs[i] = std::log(sample_gamma(rng, alpha[i] + 1.0, 1.0)) + std::log(u) / alpha[i];
  }
  const double lse = log_sum_exp(logs);
  for (std::size_t i = 0; i < alpha.size(); ++i) g[i] = std::exp(logs[i] - lse);
  return g;
}

}  // namespace vbma
