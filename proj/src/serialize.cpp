#include "vbma/serialize.hpp"

#include <limits>
#include <sstream>

#include "vbma/io.hpp"

namespace vbma {

namespace {

json matrix_to_json(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

Eigen::MatrixXd matrix_from_json(const json& j) {
  const auto rows = static_cast<Eigen::Index>(j.size());
  const auto cols = rows == 0 ? Eigen::Index{0} : static_cast<Eigen::Index>(j.at(0).size());
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    const auto& row = j.at(static_cast<std::size_t>(i));
    if (static_cast<Eigen::Index>(row.size()) != cols) throw data_error("ragged matrix in JSON");
    for (Eigen::Index c = 0; c < cols; ++c) m(i, c) = row.at(static_cast<std::size_t>(c)).get<double>();
  }
  return m;
}


json nan_to_null(double v) { return std::isnan(v) ? json(nullptr) : json(v); }

template <typename F>
auto guarded(const char* what, F&& f) {
  try {
    return f();
  } catch (const json::exception& e) {
    throw data_error(std::string("malformed ") + what + " JSON: " + e.what());
  }
}

}  // namespace

json to_json(const TransitionBinary& v) {
  return {{"pi00", v.pi00()}, {"pi01", v.pi01()}, {"pi10", v.pi10()}, {"pi11", v.pi11()}};
}

json to_json(const NullDensity& v) { return {{"mean", v.mean()}, {"sd", v.sd()}}; }

json to_json(const MixtureAlternative& v) {
  return {{"m", v.m()}, {"means", v.means()}, {"precision", v.precision()}, {"props", v.props()}};
}

json to_json(const ExpandedHMM& v) {
  json em = json::array();
  for (const auto& g : v.emissions) em.push_back({{"mean", g.mean}, {"sd", g.sd}});
  return {{"m", v.m}, {"omega", matrix_to_json(v.omega)}, {"emissions", em}};
}

json to_json(const LabelSequence& v) {
  return {{"values", v.values()}, {"n", v.size()}, {"alphabet", v.alphabet()}};
}

json to_json(const PriorSpec& v) {
  return {{"dir_row0", v.dir_row0},       {"dir_row1", v.dir_row1},   {"dir_props", v.dir_props},
          {"gamma_shape", v.gamma_shape}, {"gamma_rate", v.gamma_rate}, {"ng_mean", v.ng_mean},
          {"ng_scale", v.ng_scale}};
}

json to_json(const VariationalPosterior& v) {
  return {{"dir_row0", v.dir_row0},       {"dir_row1", v.dir_row1},     {"dir_props", v.dir_props},
          {"gamma_shape", v.gamma_shape}, {"gamma_rate", v.gamma_rate}, {"ng_means", v.ng_means},
          {"ng_scales", v.ng_scales}};
}

json to_json(const ExpectedCounts& v) {
  return {{"n00", v.n00}, {"n0plus", v.n0plus}, {"nplus0", v.nplus0}, {"nplusplus", v.nplusplus},
          {"col", v.col}, {"resp", matrix_to_json(v.resp)}};
}

json to_json(const VBEMConfig& v) {
  return {{"tol", v.tol},
          {"max_iter", v.max_iter},
          {"restarts", v.restarts},
          {"seed", v.seed},
          {"initial_law",
           {{"kind", v.initial_law.kind == InitialLaw::Kind::Stationary ? "stationary" : "fixed"},
            {"q0", v.initial_law.fixed_q0}}}};
}

json to_json(const FitResult& v) {
  return {{"m", v.m},
          {"null", to_json(v.null)},
          {"prior", to_json(v.prior)},
          {"config", to_json(v.config)},
          {"posterior", to_json(v.posterior)},
          {"counts", to_json(v.counts)},
          {"elbo_trace", v.elbo_trace},
          {"log_evidence_bound", v.log_evidence_bound},
          {"point_alt", to_json(v.point_alt)},
          {"point_pi", to_json(v.point_pi)},
          {"s_marginals", v.s_marginals},
          {"initial_law", v.initial_law},
          {"converged", v.converged},
          {"iterations", v.iterations},
          {"restart", v.restart}};
}

json to_json(const WeightVector& v) {
  return {{"values", v.values()}, {"kind", std::string(to_string(v.kind()))}, {"model_ids", v.model_ids()}};
}

json to_json(const PosteriorTrack& v) {
  return {{"values", v.values()}, {"n", v.size()}, {"source", v.source()}};
}

json to_json(const SimulationConfig& v) {
  return {{"n", v.n}, {"replicates", v.replicates}, {"c", v.c}, {"u", v.u}, {"l", v.l}, {"seed", v.seed},
          {"null", {{"mean", 0.0}, {"sd", 1.0}}}};
}

json to_json(const BenchmarkReport& v) {
  json methods = json::object();
  for (const auto& [m, s] : v.methods)
    methods[to_string(m)] = {{"mse_mean", nan_to_null(s.mse.mean)},
                             {"mse_sd", nan_to_null(s.mse.sd)},
                             {"mse_dropped_replicates", s.mse_dropped},
                             {"misclassification_mean", nan_to_null(s.misclassification.mean)},
                             {"misclassification_sd", nan_to_null(s.misclassification.sd)},
                             {"entropy_mean", nan_to_null(s.entropy_mean)},
                             {"tv_to_is_mean", nan_to_null(s.tv_to_is_mean)}};
  json reps = json::array();
  for (const auto& r : v.per_replicate) {
    json jr = {{"replicate", r.replicate}, {"ok", r.ok}};
    if (!r.ok) {
      jr["error"] = r.error;
    } else {
      json w = json::object(), mse = json::object(), mis = json::object(), ent = json::object();
      for (const auto& [m, x] : r.weights) w[to_string(m)] = x;
      for (const auto& [m, x] : r.mse) mse[to_string(m)] = nan_to_null(x);
      for (const auto& [m, x] : r.misclassification) mis[to_string(m)] = x;
      for (const auto& [m, x] : r.entropy) ent[to_string(m)] = x;
      jr["weights"] = w;
      jr["mse"] = mse;
      jr["misclassification"] = mis;
      jr["entropy"] = ent;
      jr["tv_pe_is"] = r.tv_pe_is;
      jr["tv_vb_is"] = r.tv_vb_is;
      jr["oracle_kkt_residual"] = r.oracle_kkt;
    }
    reps.push_back(std::move(jr));
  }
  return {{"config", to_json(v.config)},
          {"replicates_requested", v.replicates_requested},
          {"replicates_ok", v.replicates_ok},
          {"replicates_failed", v.replicates_failed},
          {"methods", methods},
          {"per_replicate", reps}};
}

TransitionBinary transition_from_json(const json& j) {
  return guarded("transition", [&] {
    return TransitionBinary(j.at("pi00").get<double>(), j.at("pi01").get<double>(), j.at("pi10").get<double>(),
                            j.at("pi11").get<double>());
  });
}

NullDensity null_from_json(const json& j) {
  return guarded("null density", [&] { return NullDensity(j.at("mean").get<double>(), j.at("sd").get<double>()); });
}

MixtureAlternative alternative_from_json(const json& j) {
  return guarded("mixture", [&] {
    return MixtureAlternative(j.at("means").get<std::vector<double>>(), j.at("precision").get<double>(),
                              j.at("props").get<std::vector<double>>());
  });
}

ExpandedHMM expanded_from_json(const json& j) {
  return guarded("expanded HMM", [&] {
    ExpandedHMM h{j.at("m").get<int>(), matrix_from_json(j.at("omega")), {}};
    for (const auto& e : j.at("emissions")) h.emissions.push_back({e.at("mean").get<double>(), e.at("sd").get<double>()});
    if (h.omega.rows() != h.m + 1 || h.emissions.size() != static_cast<std::size_t>(h.m + 1))
      throw data_error("expanded HMM dimensions disagree with m");
    return h;
  });
}

LabelSequence labels_from_json(const json& j) {
  return guarded("label sequence",
                 [&] { return LabelSequence(j.at("values").get<std::vector<int>>(), j.at("alphabet").get<int>()); });
}

PriorSpec prior_from_json(const json& j) {
  return guarded("prior", [&] {
    PriorSpec p;
    p.dir_row0 = j.at("dir_row0").get<std::array<double, 2>>();
    p.dir_row1 = j.at("dir_row1").get<std::array<double, 2>>();
    p.dir_props = j.at("dir_props").get<std::vector<double>>();
    p.gamma_shape = j.at("gamma_shape").get<double>();
    p.gamma_rate = j.at("gamma_rate").get<double>();
    p.ng_mean = j.at("ng_mean").get<double>();
    p.ng_scale = j.at("ng_scale").get<double>();
    p.validate();
    return p;
  });
}

VariationalPosterior posterior_from_json(const json& j) {
  return guarded("posterior", [&] {
    VariationalPosterior q;
    q.dir_row0 = j.at("dir_row0").get<std::array<double, 2>>();
    q.dir_row1 = j.at("dir_row1").get<std::array<double, 2>>();
    q.dir_props = j.at("dir_props").get<std::vector<double>>();
    q.gamma_shape = j.at("gamma_shape").get<double>();
    q.gamma_rate = j.at("gamma_rate").get<double>();
    q.ng_means = j.at("ng_means").get<std::vector<double>>();
    q.ng_scales = j.at("ng_scales").get<std::vector<double>>();
    q.validate();
    return q;
  });
}

ExpectedCounts counts_from_json(const json& j) {
  return guarded("expected counts", [&] {
    ExpectedCounts c;
    c.n00 = j.at("n00").get<double>();
    c.n0plus = j.at("n0plus").get<double>();
    c.nplus0 = j.at("nplus0").get<double>();
    c.nplusplus = j.at("nplusplus").get<double>();
    c.col = j.at("col").get<std::vector<double>>();
    c.resp = matrix_from_json(j.at("resp"));
    return c;
  });
}

VBEMConfig vbem_config_from_json(const json& j) {
  return guarded("VBEM config", [&] {
    VBEMConfig c;
    c.tol = j.at("tol").get<double>();
    c.max_iter = j.at("max_iter").get<int>();
    c.restarts = j.at("restarts").get<int>();
    c.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("initial_law")) {
      const auto& law = j.at("initial_law");
      c.initial_law.kind =
          law.at("kind").get<std::string>() == "fixed" ? InitialLaw::Kind::Fixed : InitialLaw::Kind::Stationary;
      c.initial_law.fixed_q0 = law.at("q0").get<double>();
    }
    return c;
  });
}

FitResult fit_from_json(const json& j) {
  return guarded("fit result", [&] {
    FitResult r;
    r.m = j.at("m").get<int>();
    r.null = null_from_json(j.at("null"));
    r.prior = prior_from_json(j.at("prior"));
    r.config = vbem_config_from_json(j.at("config"));
    r.posterior = posterior_from_json(j.at("posterior"));
    r.counts = counts_from_json(j.at("counts"));
    r.elbo_trace = j.at("elbo_trace").get<std::vector<double>>();
    r.log_evidence_bound = j.at("log_evidence_bound").get<double>();
    r.point_alt = alternative_from_json(j.at("point_alt"));
    r.point_pi = transition_from_json(j.at("point_pi"));
    r.s_marginals = j.at("s_marginals").get<std::vector<double>>();
    r.initial_law = j.at("initial_law").get<std::array<double, 2>>();
    r.converged = j.at("converged").get<bool>();
    r.iterations = j.at("iterations").get<int>();
    r.restart = j.at("restart").get<int>();
    if (r.posterior.m() != r.m || r.counts.m() != r.m) throw data_error("fit result component counts disagree");
    return r;
  });
}

WeightVector weights_from_json(const json& j) {
  return guarded("weight vector", [&] {
    return WeightVector(j.at("values").get<std::vector<double>>(),
                        weight_kind_from_string(j.at("kind").get<std::string>()),
                        j.at("model_ids").get<std::vector<int>>());
  });
}

PosteriorTrack track_from_json(const json& j) {
  return guarded("posterior track", [&] {
    return PosteriorTrack(j.at("values").get<std::vector<double>>(), j.at("source").get<std::string>());
  });
}

SimulationConfig simulation_config_from_json(const json& j) {
  return guarded("simulation config", [&] {
    SimulationConfig c;
    c.n = j.at("n").get<int>();
    c.replicates = j.at("replicates").get<int>();
    c.c = j.at("c").get<double>();
    c.u = j.at("u").get<double>();
    c.l = j.at("l").get<double>();
    c.seed = j.at("seed").get<std::uint64_t>();
    c.validate();
    return c;
  });
}

std::string benchmark_csv(const std::vector<BenchmarkReport>& reports) {
  std::ostringstream out;
  out << "method,c,u,l,metric,value\n";
  for (const auto& r : reports)
    for (const auto& [m, s] : r.methods) {
      const auto prefix = to_string(m) + "," + format_double(r.config.c) + "," + format_double(r.config.u) + "," +
                          format_double(r.config.l) + ",";
      out << prefix << "mse_mean," << format_double(s.mse.mean) << "\n";
      out << prefix << "mse_sd," << format_double(s.mse.sd) << "\n";
      out << prefix << "misclassification_mean," << format_double(s.misclassification.mean) << "\n";
      out << prefix << "misclassification_sd," << format_double(s.misclassification.sd) << "\n";
      out << prefix << "entropy_mean," << format_double(s.entropy_mean) << "\n";
      out << prefix << "tv_to_is_mean," << format_double(s.tv_to_is_mean) << "\n";
    }
  return out.str();
}

}  // namespace vbma
