#include "vbma/model.hpp"

#include <algorithm>
#include <numeric>
#include <string>

namespace vbma {

namespace {

void check_prob(double p, const char* what) {
  if (!(p >= 0.0 && p <= 1.0)) throw data_error(std::string(what) + " must lie in [0, 1]");
}

}  // namespace

TransitionBinary::TransitionBinary(double pi00, double pi01, double pi10, double pi11)
    : p_{pi00, pi01, pi10, pi11} {
  check_prob(pi00, "pi00");
  check_prob(pi01, "pi01");
  check_prob(pi10, "pi10");
  check_prob(pi11, "pi11");
  if (std::abs(pi00 + pi01 - 1.0) > kTolerance || std::abs(pi10 + pi11 - 1.0) > kTolerance)
    throw data_error("transition rows must sum to 1");
}

NullDensity::NullDensity(double mean, double sd) : mean_(mean), sd_(sd) {
  if (!std::isfinite(mean)) throw data_error("null mean must be finite");
  if (!(sd > 0.0) || !std::isfinite(sd)) throw data_error("null sd must be positive");
}

MixtureAlternative::MixtureAlternative(std::vector<double> means, double precision, std::vector<double> props)
    : precision_(precision) {
  if (means.empty()) throw data_error("mixture needs at least one component");
  if (means.size() != props.size()) throw data_error("mixture means and proportions differ in length");
  if (!(precision > 0.0) || !std::isfinite(precision)) throw data_error("mixture precision must be positive");
  double total = 0.0;
  for (double p : props) {
    check_prob(p, "mixture proportion");
    total += p;
  }
  if (std::abs(total - 1.0) > kTolerance) throw data_error("mixture proportions must sum to 1");
  for (double mu : means)
    if (!std::isfinite(mu)) throw data_error("mixture means must be finite");

  std::vector<std::size_t> order(means.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return means[a] < means[b]; });
  means_.reserve(order.size());
  props_.reserve(order.size());
  for (auto i : order) {
    means_.push_back(means[i]);
    props_.push_back(props[i]);
  }
}

double MixtureAlternative::logpdf(double x) const {
  std::vector<double> terms(means_.size());
  for (std::size_t k = 0; k < means_.size(); ++k)
    terms[k] = std::log(props_[k]) + normal_logpdf_prec(x, means_[k], precision_);
  return log_sum_exp(terms);
}

LabelSequence::LabelSequence(std::vector<int> values, int alphabet) : values_(std::move(values)), alphabet_(alphabet) {
  if (alphabet < 1) throw data_error("label alphabet must be nonempty");
  for (int v : values_)
    if (v < 0 || v >= alphabet) throw data_error("label outside its alphabet");
}

ExpandedHMM expand(const TransitionBinary& pi, const MixtureAlternative& alt, const NullDensity& null) {
  const int m = alt.m();
  const auto& p = alt.props();
  ExpandedHMM hmm{m, Eigen::MatrixXd::Zero(m + 1, m + 1), {}};
  hmm.omega(0, 0) = pi.pi00();
  for (int k = 1; k <= m; ++k) hmm.omega(k, 0) = pi.pi10();
  for (int j = 1; j <= m; ++j) {
    hmm.omega(0, j) = pi.pi01() * p[j - 1];
    for (int k = 1; k <= m; ++k) hmm.omega(k, j) = pi.pi11() * p[j - 1];
  }
  hmm.emissions.reserve(m + 1);
  hmm.emissions.push_back({null.mean(), null.sd()});
  const double sd = std::sqrt(alt.variance());
  for (double mu : alt.means()) hmm.emissions.push_back({mu, sd});
  return hmm;
}

ExpansionStructure recover_structure(const Eigen::MatrixXd& omega, double tol) {
  const auto K = omega.rows();
  if (K < 2 || omega.cols() != K) throw data_error("omega must be square with at least two states");
  for (Eigen::Index k = 2; k < K; ++k)
    if ((omega.row(k) - omega.row(1)).cwiseAbs().maxCoeff() > tol)
      throw data_error("omega rows 1..m differ");
  const double pi00 = omega(0, 0), pi10 = omega(1, 0);
  const double pi01 = 1.0 - pi00, pi11 = 1.0 - pi10;
  std::vector<double> props(static_cast<std::size_t>(K - 1));
  // Proportions come from whichever row carries more mass on the alternative.
  const Eigen::Index ref = pi11 >= pi01 ? 1 : 0;
  const double mass = ref == 1 ? pi11 : pi01;
  if (mass <= 0.0) throw data_error("omega has no alternative mass; proportions are not identifiable");
  for (Eigen::Index j = 1; j < K; ++j) props[static_cast<std::size_t>(j - 1)] = omega(ref, j) / mass;
  for (Eigen::Index j = 1; j < K; ++j) {
    const double p = props[static_cast<std::size_t>(j - 1)];
    if (std::abs(omega(0, j) - pi01 * p) > tol || std::abs(omega(1, j) - pi11 * p) > tol)
      throw data_error("omega is not of the form pi * p");
  }
  return {TransitionBinary(pi00, pi01, pi10, pi11), std::move(props)};
}

std::array<double, 2> stationary(const TransitionBinary& pi) {
  const double s = pi.pi01() + pi.pi10();
  if (!(s > 0.0)) throw numeric_error("degenerate chain: stationary law is not unique");
  const double q1 = pi.pi01() / s;
  return {1.0 - q1, q1};
}

double log_emission(double x, const ExpandedHMM& hmm, int state) {
  if (state < 0 || state > hmm.m) throw usage_error("state index out of range");
  return hmm.emissions[static_cast<std::size_t>(state)].logpdf(x);
}

std::vector<WeightedComponent> averaged_density_components(const std::vector<MixtureAlternative>& fits,
                                                           const WeightVector& weights) {
  if (fits.size() != weights.size()) throw usage_error("one mixture per weighted model is required");
  std::vector<WeightedComponent> out;
  for (std::size_t i = 0; i < fits.size(); ++i) {
    const auto& f = fits[i];
    for (int k = 0; k < f.m(); ++k)
      out.push_back({weights[i] * f.props()[static_cast<std::size_t>(k)], f.means()[static_cast<std::size_t>(k)],
                     f.precision(), weights.model_ids()[i]});
  }
  return out;
}

double mixture_logpdf(const std::vector<WeightedComponent>& components, double x) {
  std::vector<double> terms;
  terms.reserve(components.size());
  for (const auto& c : components)
    terms.push_back(c.weight > 0.0 ? std::log(c.weight) + normal_logpdf_prec(x, c.mean, c.precision) : kNegInf);
  return log_sum_exp(terms);
}

}  // namespace vbma
