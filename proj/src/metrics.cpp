#include "vbma/metrics.hpp"

#include <cmath>
#include <limits>

namespace vbma {

bool Band::retains(double null_class_prob) const {
  const double p = orientation == BandOrientation::InterestClass ? 1.0 - null_class_prob : null_class_prob;
  return p > low && p < high;
}

std::vector<bool> band_mask(const PosteriorTrack& truth, const Band& band) {
  std::vector<bool> keep(truth.size());
  for (std::size_t t = 0; t < keep.size(); ++t) keep[t] = band.retains(truth[t]);
  return keep;
}

double mse_single(const PosteriorTrack& estimate, const PosteriorTrack& truth, const Band& band) {
  if (estimate.size() != truth.size()) throw usage_error("estimate and truth differ in length");
  double sum = 0.0;
  std::size_t kept = 0;
  for (std::size_t t = 0; t < truth.size(); ++t) {
    if (!band.retains(truth[t])) continue;
    const double d = estimate[t] - truth[t];
    sum += d * d;
    ++kept;
  }
  return kept == 0 ? std::numeric_limits<double>::quiet_NaN() : sum / static_cast<double>(kept);
}

MeanSd mean_sd(const std::vector<double>& xs) {
  double sum = 0.0;
  int n = 0;
  for (double x : xs)
    if (!std::isnan(x)) {
      sum += x;
      ++n;
    }
  if (n == 0) return {std::numeric_limits<double>::quiet_NaN(), std::numeric_limits<double>::quiet_NaN()};
  const double mean = sum / n;
  double ss = 0.0;
  for (double x : xs)
    if (!std::isnan(x)) ss += (x - mean) * (x - mean);
  return {mean, n > 1 ? std::sqrt(ss / (n - 1)) : 0.0};
}

MseSummary mse_banded(const std::vector<PosteriorTrack>& estimates, const std::vector<PosteriorTrack>& truths,
                      const Band& band) {
  if (estimates.size() != truths.size()) throw usage_error("estimates and truths differ in replicate count");
  MseSummary out;
  for (std::size_t p = 0; p < truths.size(); ++p) {
    const double v = mse_single(estimates[p], truths[p], band);
    out.per_replicate.push_back(v);
    if (std::isnan(v))
      ++out.dropped;
    else
      ++out.used;
  }
  if (out.used == 0) throw data_error("no replicate retains a timepoint inside the band");
  const auto ms = mean_sd(out.per_replicate);
  out.mean = ms.mean;
  out.sd = ms.sd;
  return out;
}

double misclassification(const LabelSequence& pred, const LabelSequence& truth) {
  if (pred.size() != truth.size()) throw usage_error("label sequences differ in length");
  if (pred.alphabet() != 2 || truth.alphabet() != 2) throw usage_error("misclassification needs binary labels");
  if (pred.size() == 0) throw usage_error("label sequences are empty");
  std::size_t wrong = 0;
  for (std::size_t t = 0; t < pred.size(); ++t) wrong += pred[t] != truth[t];
  return static_cast<double>(wrong) / static_cast<double>(pred.size());
}

}  // namespace vbma
