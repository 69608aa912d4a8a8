#ifndef VBMA_MODEL_HPP
#define VBMA_MODEL_HPP

// Binary HMM with a known null emission and a Gaussian-mixture alternative,
// and its (m+1)-state expansion.

#include <array>
#include <vector>

#include <Eigen/Dense>

#include "vbma/common.hpp"
#include "vbma/weight_vector.hpp"

namespace vbma {

/// 2x2 row-stochastic transition matrix of the binary label chain.
class TransitionBinary {
 public:
  static constexpr double kTolerance = 1e-12;

  TransitionBinary(double pi00, double pi01, double pi10, double pi11);

  double pi00() const noexcept { return p_[0]; }
  double pi01() const noexcept { return p_[1]; }
  double pi10() const noexcept { return p_[2]; }
  double pi11() const noexcept { return p_[3]; }
  double operator()(int from, int to) const { return p_[2 * from + to]; }

 private:
  std::array<double, 4> p_;
};

/// Known null emission density (Gaussian).
class NullDensity {
 public:
  NullDensity(double mean, double sd);
  double mean() const noexcept { return mean_; }
  double sd() const noexcept { return sd_; }
  double logpdf(double x) const { return normal_logpdf(x, mean_, sd_); }

 private:
  double mean_;
  double sd_;
};

/// Homoscedastic Gaussian mixture for the alternative class. Components are
/// kept sorted by mean; the constructor reorders (mean, prop) pairs.
class MixtureAlternative {
 public:
  static constexpr double kTolerance = 1e-12;

  MixtureAlternative(std::vector<double> means, double precision, std::vector<double> props);

  int m() const noexcept { return static_cast<int>(means_.size()); }
  const std::vector<double>& means() const noexcept { return means_; }
  const std::vector<double>& props() const noexcept { return props_; }
  double precision() const noexcept { return precision_; }
  double variance() const noexcept { return 1.0 / precision_; }

  double logpdf(double x) const;

 private:
  std::vector<double> means_;
  double precision_;
  std::vector<double> props_;
};

struct Gaussian {
  double mean;
  double sd;
  double logpdf(double x) const { return normal_logpdf(x, mean, sd); }
};

/// (m+1)-state chain: state 0 is the null, states 1..m the mixture components.
struct ExpandedHMM {
  int m;
  Eigen::MatrixXd omega;
  std::vector<Gaussian> emissions;

  int states() const noexcept { return m + 1; }
};

/// Hidden label path over an alphabet {0, ..., alphabet-1}.
class LabelSequence {
 public:
  LabelSequence(std::vector<int> values, int alphabet);

  const std::vector<int>& values() const noexcept { return values_; }
  int alphabet() const noexcept { return alphabet_; }
  std::size_t size() const noexcept { return values_.size(); }
  int operator[](std::size_t t) const { return values_[t]; }

 private:
  std::vector<int> values_;
  int alphabet_;
};

ExpandedHMM expand(const TransitionBinary& pi, const MixtureAlternative& alt, const NullDensity& null);

/// Inverse of `expand` on its structured image: returns Pi and the mixture
/// proportions. Throws if `omega` lacks the factorized structure.
struct ExpansionStructure {
  TransitionBinary pi;
  std::vector<double> props;
};
ExpansionStructure recover_structure(const Eigen::MatrixXd& omega, double tol = 1e-9);

/// Stationary law (q0, q1) of an irreducible binary chain.
std::array<double, 2> stationary(const TransitionBinary& pi);

double log_emission(double x, const ExpandedHMM& hmm, int state);

struct WeightedComponent {
  double weight;
  double mean;
  double precision;
  int model_id;
};

/// Model-averaged alternative density flattened into its components; weight
/// of component k of model m is alpha_m * p_k^{(m)}.
std::vector<WeightedComponent> averaged_density_components(const std::vector<MixtureAlternative>& fits,
                                                           const WeightVector& weights);

double mixture_logpdf(const std::vector<WeightedComponent>& components, double x);

}  // namespace vbma

#endif  // VBMA_MODEL_HPP
