#ifndef VBMA_COMMON_HPP
#define VBMA_COMMON_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string>

namespace vbma {

/// Failure categories. The CLI maps them onto its exit codes.
enum class ErrorKind { Usage, Data, Numeric };

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

inline Error usage_error(const std::string& what) { return {ErrorKind::Usage, what}; }
inline Error data_error(const std::string& what) { return {ErrorKind::Data, what}; }
inline Error numeric_error(const std::string& what) { return {ErrorKind::Numeric, what}; }

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr double kLog2Pi = 1.8378770664093454836;

/// Probabilities are clamped to [kProbFloor, 1 - kProbFloor] before taking logs.
constexpr double kProbFloor = 1e-12;

inline double safe_log_prob(double p) {
  return std::log(std::clamp(p, kProbFloor, 1.0 - kProbFloor));
}

inline double log_sum_exp(double a, double b) {
  if (a == kNegInf) return b;
  if (b == kNegInf) return a;
  const double hi = std::max(a, b);
  return hi + std::log1p(std::exp(std::min(a, b) - hi));
}

inline double log_sum_exp(std::span<const double> xs) {
  double hi = kNegInf;
  for (double x : xs) hi = std::max(hi, x);
  if (hi == kNegInf) return kNegInf;
  if (!std::isfinite(hi)) return hi;
  double acc = 0.0;
  for (double x : xs) acc += std::exp(x - hi);
  return hi + std::log(acc);
}

inline double normal_logpdf(double x, double mean, double sd) {
  const double z = (x - mean) / sd;
  return -0.5 * kLog2Pi - std::log(sd) - 0.5 * z * z;
}

/// Gaussian log-density parameterized by precision.
inline double normal_logpdf_prec(double x, double mean, double precision) {
  const double d = x - mean;
  return 0.5 * (std::log(precision) - kLog2Pi) - 0.5 * precision * d * d;
}

double digamma(double x);

/// Log-density of a Dirichlet over its first K-1 free coordinates.
/// A one-dimensional Dirichlet is a point mass and contributes 0.
double dirichlet_logpdf(std::span<const double> p, std::span<const double> alpha);

/// Gamma(shape, rate) log-density.
double gamma_logpdf(double x, double shape, double rate);

/// KL(Dir(a) || Dir(b)).
double dirichlet_kl(std::span<const double> a, std::span<const double> b);

/// KL(Gamma(a, b) || Gamma(a0, b0)), shape-rate parameterization.
double gamma_kl(double a, double b, double a0, double b0);

double standard_normal_quantile(double p);
double standard_normal_cdf(double x);

}  // namespace vbma

#endif  // VBMA_COMMON_HPP
