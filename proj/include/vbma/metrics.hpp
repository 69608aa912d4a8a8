#ifndef VBMA_METRICS_HPP
#define VBMA_METRICS_HPP

#include <utility>
#include <vector>

#include "vbma/averaging.hpp"
#include "vbma/model.hpp"

namespace vbma {

/// Which class probability the exclusion band is applied to.
enum class BandOrientation { InterestClass, NullClass };

struct Band {
  double low = 0.2;
  double high = 0.8;
  BandOrientation orientation = BandOrientation::InterestClass;

  /// Strict inequalities low < p < high on the oriented probability.
  bool retains(double null_class_prob) const;
};

std::vector<bool> band_mask(const PosteriorTrack& truth, const Band& band);

struct MseSummary {
  double mean = 0.0;
  double sd = 0.0;
  int used = 0;     // replicates with at least one retained point
  int dropped = 0;  // replicates with none
  std::vector<double> per_replicate;  // NaN for dropped replicates
};

/// Mean squared error over retained timepoints of one replicate.
/// Returns NaN when nothing is retained.
double mse_single(const PosteriorTrack& estimate, const PosteriorTrack& truth, const Band& band);

MseSummary mse_banded(const std::vector<PosteriorTrack>& estimates, const std::vector<PosteriorTrack>& truths,
                      const Band& band = {});

double misclassification(const LabelSequence& pred, const LabelSequence& truth);

struct MeanSd {
  double mean = 0.0;
  double sd = 0.0;
};

/// Sample mean and (n-1) standard deviation, skipping NaN entries.
MeanSd mean_sd(const std::vector<double>& xs);

}  // namespace vbma

#endif  // VBMA_METRICS_HPP
