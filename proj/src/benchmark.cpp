#include "vbma/benchmark.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <limits>
#include <thread>

namespace vbma {

std::string to_string(Method m) {
  switch (m) {
    case Method::VB: return "VB";
    case Method::PE: return "PE";
    case Method::IS: return "IS";
    case Method::Selected: return "SELECTED";
    case Method::TwoState: return "TWO_STATE";
    case Method::Oracle: return "ORACLE";
  }
  return "?";
}

namespace {

constexpr std::uint64_t kFitSalt = 0xF17;
constexpr std::uint64_t kIsSalt = 0x1A5;

ReplicateResult score_replicate(const SimulationConfig& sim, int replicate, const BenchmarkOptions& opt) {
  ReplicateResult r;
  r.replicate = replicate;
  const auto data = sample_dataset(sim, replicate);
  const auto truth = theoretical_posterior(data.x, sim);
  const NullDensity null(0.0, 1.0);

  VBEMConfig vcfg = opt.vbem;
  vcfg.seed = derive_seed(sim.seed, static_cast<std::uint64_t>(replicate), kFitSalt);
  std::vector<FitResult> fits;
  std::vector<int> ids;
  for (int m = 1; m <= opt.max_components; ++m) {
    fits.push_back(fit(data.x, m, null, PriorSpec::defaults(m), vcfg));
    ids.push_back(m);
  }
  const auto prior_m = uniform_model_prior(fits.size());
  std::vector<PosteriorTrack> tracks;
  for (const auto& f : fits) tracks.push_back(model_track(f));

  const auto vb = vb_weights(fits, prior_m);
  const auto pe = pe_weights(fits, prior_m, data.x);
  const auto is = is_weights(fits, prior_m, data.x,
                             {opt.is_samples, derive_seed(sim.seed, static_cast<std::uint64_t>(replicate), kIsSalt)});
  const auto keep = band_mask(truth, opt.band);
  const auto oracle = oracle_weights(truth, tracks, keep, ids);
  const auto selected = WeightVector::unit(opt.select_by_vb ? vb.argmax() : is.weights.argmax(), WeightKind::IS, ids);
  const auto two_state = WeightVector::unit(0, WeightKind::VB, ids);

  {
    std::vector<std::size_t> rows;
    for (std::size_t t = 0; t < truth.size(); ++t)
      if (keep[t]) rows.push_back(t);
    if (rows.empty())
      for (std::size_t t = 0; t < truth.size(); ++t) rows.push_back(t);
    Eigen::MatrixXd A(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(tracks.size()));
    Eigen::VectorXd y(A.rows());
    for (std::size_t i = 0; i < rows.size(); ++i) {
      y(static_cast<Eigen::Index>(i)) = truth[rows[i]];
      for (std::size_t m = 0; m < tracks.size(); ++m)
        A(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(m)) = tracks[m][rows[i]];
    }
    const Eigen::Map<const Eigen::VectorXd> a(oracle.values().data(), static_cast<Eigen::Index>(oracle.size()));
    r.oracle_kkt = simplex_ls_kkt(A, y, a).max();
  }

  const std::map<Method, const WeightVector*> weights{{Method::VB, &vb},        {Method::PE, &pe},
                                                       {Method::IS, &is.weights}, {Method::Selected, &selected},
                                                       {Method::TwoState, &two_state}, {Method::Oracle, &oracle}};
  for (const auto& [method, w] : weights) {
    const auto track = averaged_posterior(tracks, *w);
    r.weights[method] = w->values();
    r.mse[method] = mse_single(track, truth, opt.band);
    r.misclassification[method] = misclassification(classify(track, opt.threshold), data.s);
    r.entropy[method] = entropy(*w);
  }
  r.tv_pe_is = total_variation(pe, is.weights);
  r.tv_vb_is = total_variation(vb, is.weights);
  r.ok = true;
  return r;
}

double tv_values(const std::vector<double>& a, const std::vector<double>& b) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) d += std::abs(a[i] - b[i]);
  return 0.5 * d;
}

}  // namespace

std::vector<FitResult> fit_collection(std::span<const double> data, const std::vector<int>& components,
                                      const NullDensity& null, const std::function<PriorSpec(int)>& prior,
                                      const VBEMConfig& cfg, int jobs) {
  const int count = static_cast<int>(components.size());
  std::vector<std::optional<FitResult>> out(components.size());
  std::vector<std::exception_ptr> errors(components.size());
  std::atomic<int> next{0};
  auto worker = [&] {
    for (int i = next++; i < count; i = next++) {
      const auto k = static_cast<std::size_t>(i);
      try {
        out[k] = fit(data, components[k], null, prior(components[k]), cfg);
      } catch (...) {
        errors[k] = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  for (int j = 1; j < std::clamp(jobs, 1, std::max(count, 1)); ++j) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);
  std::vector<FitResult> fits;
  for (auto& f : out) fits.push_back(std::move(*f));
  return fits;
}

ReplicateResult run_replicate(const SimulationConfig& sim, int replicate, const BenchmarkOptions& opt) {
  try {
    return score_replicate(sim, replicate, opt);
  } catch (const std::exception& e) {
    ReplicateResult r;
    r.replicate = replicate;
    r.ok = false;
    r.error = e.what();
    return r;
  }
}

BenchmarkReport run_benchmark(const SimulationConfig& sim, const BenchmarkOptions& opt) {
  sim.validate();
  if (opt.max_components < 1) throw usage_error("benchmark needs at least one model");
  BenchmarkReport rep;
  rep.config = sim;
  rep.replicates_requested = sim.replicates;
  rep.per_replicate.resize(static_cast<std::size_t>(sim.replicates));

  std::atomic<int> next{0};
  auto worker = [&] {
    for (int i = next++; i < sim.replicates; i = next++) rep.per_replicate[static_cast<std::size_t>(i)] = run_replicate(sim, i, opt);
  };
  const int jobs = std::clamp(opt.jobs, 1, sim.replicates);
  std::vector<std::thread> pool;
  for (int j = 1; j < jobs; ++j) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  for (const auto& r : rep.per_replicate) (r.ok ? rep.replicates_ok : rep.replicates_failed)++;

  for (Method m : kAllMethods) {
    std::vector<double> mse, mis, ent, tv;
    int dropped = 0;
    for (const auto& r : rep.per_replicate) {
      if (!r.ok) continue;
      const double v = r.mse.at(m);
      if (std::isnan(v)) ++dropped;
      mse.push_back(v);
      mis.push_back(r.misclassification.at(m));
      ent.push_back(r.entropy.at(m));
      tv.push_back(tv_values(r.weights.at(m), r.weights.at(Method::IS)));
    }
    MethodSummary s;
    s.mse = mean_sd(mse);
    s.misclassification = mean_sd(mis);
    s.entropy_mean = mean_sd(ent).mean;
    s.tv_to_is_mean = mean_sd(tv).mean;
    s.mse_dropped = dropped;
    rep.methods[m] = s;
  }
  return rep;
}

}  // namespace vbma
