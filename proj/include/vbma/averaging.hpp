#ifndef VBMA_AVERAGING_HPP
#define VBMA_AVERAGING_HPP

#include <string>
#include <vector>

#include "vbma/model.hpp"
#include "vbma/weight_vector.hpp"

namespace vbma {

struct FitResult;

/// Per-timepoint probability of the null ("normal") class, T_t = P(S_t = 0 | X).
class PosteriorTrack {
 public:
  PosteriorTrack(std::vector<double> values, std::string source);

  const std::vector<double>& values() const noexcept { return values_; }
  const std::string& source() const noexcept { return source_; }
  std::size_t size() const noexcept { return values_.size(); }
  double operator[](std::size_t t) const { return values_[t]; }

 private:
  std::vector<double> values_;
  std::string source_;
};

/// 1 - Q(S_t = 1) of a single fit.
PosteriorTrack model_track(const FitResult& fit);

PosteriorTrack averaged_posterior(const std::vector<FitResult>& fits, const WeightVector& w);
PosteriorTrack averaged_posterior(const std::vector<PosteriorTrack>& tracks, const WeightVector& w);

/// Label 0 where T_t >= threshold, else 1.
LabelSequence classify(const PosteriorTrack& track, double threshold = 0.5);

}  // namespace vbma

#endif  // VBMA_AVERAGING_HPP
