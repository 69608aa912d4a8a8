#ifndef VBMA_BENCHMARK_HPP
#define VBMA_BENCHMARK_HPP

#include <array>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "vbma/metrics.hpp"
#include "vbma/simulation.hpp"
#include "vbma/vbem.hpp"
#include "vbma/weights.hpp"

namespace vbma {

/// Scored methods. VB/PE/IS/Oracle average over the collection; Selected is
/// the single model with the largest IS (or VB) weight; TwoState is m = 1.
enum class Method { VB, PE, IS, Selected, TwoState, Oracle };

inline constexpr std::array<Method, 6> kAllMethods{Method::VB,       Method::PE,       Method::IS,
                                                   Method::Selected, Method::TwoState, Method::Oracle};

std::string to_string(Method m);

struct BenchmarkOptions {
  int max_components = 7;
  VBEMConfig vbem{};
  int is_samples = 1000;
  double threshold = 0.5;
  Band band{};
  bool select_by_vb = false;
  int jobs = 1;
};

struct ReplicateResult {
  int replicate = 0;
  bool ok = false;
  std::string error;
  std::map<Method, std::vector<double>> weights;
  std::map<Method, double> mse;               // NaN when no point is retained
  std::map<Method, double> misclassification;
  std::map<Method, double> entropy;
  double tv_pe_is = 0.0;
  double tv_vb_is = 0.0;
  double oracle_kkt = 0.0;
};

struct MethodSummary {
  MeanSd mse;
  MeanSd misclassification;
  double entropy_mean = 0.0;
  double tv_to_is_mean = 0.0;  // NaN for methods without a weight vector vs IS
  int mse_dropped = 0;
};

struct BenchmarkReport {
  SimulationConfig config;
  int replicates_requested = 0;
  int replicates_ok = 0;
  int replicates_failed = 0;
  std::map<Method, MethodSummary> methods;
  std::vector<ReplicateResult> per_replicate;
};

/// Fits every model in `components` on `data`, up to `jobs` at a time.
/// Results are ordered as `components` and do not depend on `jobs`.
std::vector<FitResult> fit_collection(std::span<const double> data, const std::vector<int>& components,
                                      const NullDensity& null, const std::function<PriorSpec(int)>& prior,
                                      const VBEMConfig& cfg, int jobs = 1);

/// Simulate, fit the collection {1..max_components}, weight, average and score
/// one replicate. Failures are captured in the result.
ReplicateResult run_replicate(const SimulationConfig& sim, int replicate, const BenchmarkOptions& opt);

BenchmarkReport run_benchmark(const SimulationConfig& sim, const BenchmarkOptions& opt);

}  // namespace vbma

#endif  // VBMA_BENCHMARK_HPP
