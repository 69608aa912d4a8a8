#ifndef VBMA_SERIALIZE_HPP
#define VBMA_SERIALIZE_HPP

// JSON forms of the library types. Field names follow the type definitions;
// probabilities are written as decimal doubles.

#include <nlohmann/json.hpp>

#include "vbma/benchmark.hpp"
#include "vbma/model.hpp"
#include "vbma/simulation.hpp"
#include "vbma/vbem.hpp"
#include "vbma/weights.hpp"

namespace vbma {

using json = nlohmann::json;

json to_json(const TransitionBinary& v);
json to_json(const NullDensity& v);
json to_json(const MixtureAlternative& v);
json to_json(const ExpandedHMM& v);
json to_json(const LabelSequence& v);
json to_json(const PriorSpec& v);
json to_json(const VariationalPosterior& v);
json to_json(const ExpectedCounts& v);
json to_json(const VBEMConfig& v);
json to_json(const FitResult& v);
json to_json(const WeightVector& v);
json to_json(const PosteriorTrack& v);
json to_json(const SimulationConfig& v);
json to_json(const BenchmarkReport& v);

TransitionBinary transition_from_json(const json& j);
NullDensity null_from_json(const json& j);
MixtureAlternative alternative_from_json(const json& j);
ExpandedHMM expanded_from_json(const json& j);
LabelSequence labels_from_json(const json& j);
PriorSpec prior_from_json(const json& j);
VariationalPosterior posterior_from_json(const json& j);
ExpectedCounts counts_from_json(const json& j);
VBEMConfig vbem_config_from_json(const json& j);
FitResult fit_from_json(const json& j);
WeightVector weights_from_json(const json& j);
PosteriorTrack track_from_json(const json& j);
SimulationConfig simulation_config_from_json(const json& j);

/// Flat (method, c, u, l, metric, value) rows.
std::string benchmark_csv(const std::vector<BenchmarkReport>& reports);

}  // namespace vbma

#endif  // VBMA_SERIALIZE_HPP
