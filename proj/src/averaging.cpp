#include "vbma/averaging.hpp"

#include <algorithm>
#include <string>

#include "vbma/vbem.hpp"

namespace vbma {

PosteriorTrack::PosteriorTrack(std::vector<double> values, std::string source)
    : values_(std::move(values)), source_(std::move(source)) {
  // Round-off from 1 - sum(...) is folded back into [0, 1].
  constexpr double kSlack = 1e-9;
  for (double& v : values_) {
    if (!(v >= -kSlack && v <= 1.0 + kSlack)) throw numeric_error("posterior track value outside [0, 1]");
    v = std::clamp(v, 0.0, 1.0);
  }
}

PosteriorTrack model_track(const FitResult& fit) {
  std::vector<double> v(fit.s_marginals.size());
  for (std::size_t t = 0; t < v.size(); ++t) v[t] = 1.0 - fit.s_marginals[t];
  return {std::move(v), "m=" + std::to_string(fit.m)};
}

PosteriorTrack averaged_posterior(const std::vector<PosteriorTrack>& tracks, const WeightVector& w) {
  if (tracks.size() != w.size()) throw usage_error("one track per weighted model is required");
  if (tracks.empty()) throw usage_error("no tracks to average");
  const std::size_t n = tracks.front().size();
  for (const auto& t : tracks)
    if (t.size() != n) throw usage_error("model tracks differ in length");
  // T~_t = 1 - sum_m alpha_m E_m(S_t)
  std::vector<double> out(n, 1.0);
  for (std::size_t m = 0; m < tracks.size(); ++m)
    for (std::size_t t = 0; t < n; ++t) out[t] -= w[m] * (1.0 - tracks[m][t]);
  // clamp into the hull of the model tracks
  for (std::size_t t = 0; t < n; ++t) {
    double lo = tracks.front()[t], hi = lo;
    for (const auto& tr : tracks) {
      lo = std::min(lo, tr[t]);
      hi = std::max(hi, tr[t]);
    }
    out[t] = std::clamp(out[t], lo, hi);
  }
  return {std::move(out), "averaged"};
}

PosteriorTrack averaged_posterior(const std::vector<FitResult>& fits, const WeightVector& w) {
  std::vector<PosteriorTrack> tracks;
  tracks.reserve(fits.size());
  for (const auto& f : fits) tracks.push_back(model_track(f));
  return averaged_posterior(tracks, w);
}

LabelSequence classify(const PosteriorTrack& track, double threshold) {
  if (!(threshold > 0.0 && threshold < 1.0)) throw usage_error("threshold must lie in (0, 1)");
  std::vector<int> labels(track.size());
  for (std::size_t t = 0; t < labels.size(); ++t) labels[t] = track[t] >= threshold ? 0 : 1;
  return {std::move(labels), 2};
}

}  // namespace vbma
