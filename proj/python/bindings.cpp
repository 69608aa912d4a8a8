#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "commands.hpp"
#include "vbma/benchmark.hpp"
#include "vbma/serialize.hpp"
#include "vbma/version.hpp"

namespace py = pybind11;
using namespace vbma;

namespace {

std::vector<double> prior_or_uniform(const std::optional<std::vector<double>>& prior, std::size_t count) {
  return prior ? *prior : uniform_model_prior(count);
}

VBEMConfig make_config(double tol, int max_iter, int restarts, std::uint64_t seed, bool stationary, double q0) {
  VBEMConfig cfg;
  cfg.tol = tol;
  cfg.max_iter = max_iter;
  cfg.restarts = restarts;
  cfg.seed = seed;
  cfg.initial_law = {stationary ? InitialLaw::Kind::Stationary : InitialLaw::Kind::Fixed, q0};
  return cfg;
}

py::dict weights_dict(const WeightVector& w) {
  py::dict d;
  d["values"] = w.values();
  d["model_ids"] = w.model_ids();
  d["kind"] = std::string(to_string(w.kind()));
  d["entropy"] = entropy(w);
  return d;
}

WeightVector weights_from(const std::vector<double>& values, const std::vector<int>& ids) {
  return {values, WeightKind::VB, ids};
}

std::vector<int> ids_of(const std::vector<FitResult>& fits) {
  std::vector<int> ids;
  for (const auto& f : fits) ids.push_back(f.m);
  return ids;
}

py::object as_python(const json& j) {
  return py::module_::import("json").attr("loads")(j.dump());
}

}  // namespace

PYBIND11_MODULE(_vbma, mod) {
  mod.doc() = "Variational Bayesian model averaging for binary HMM classification";
  mod.attr("__version__") = kVersion;

  py::register_exception<Error>(mod, "VbmaError", PyExc_ValueError);

  py::class_<FitResult>(mod, "FitResult")
      .def_readonly("m", &FitResult::m)
      .def_readonly("elbo", &FitResult::log_evidence_bound)
      .def_readonly("elbo_trace", &FitResult::elbo_trace)
      .def_readonly("s_marginals", &FitResult::s_marginals)
      .def_readonly("converged", &FitResult::converged)
      .def_readonly("iterations", &FitResult::iterations)
      .def_readonly("restart", &FitResult::restart)
      .def_property_readonly("track", [](const FitResult& f) { return model_track(f).values(); })
      .def_property_readonly("means", [](const FitResult& f) { return f.point_alt.means(); })
      .def_property_readonly("props", [](const FitResult& f) { return f.point_alt.props(); })
      .def_property_readonly("precision", [](const FitResult& f) { return f.point_alt.precision(); })
      .def_property_readonly("transition",
                             [](const FitResult& f) {
                               const auto& p = f.point_pi;
                               return std::array<std::array<double, 2>, 2>{{{p.pi00(), p.pi01()}, {p.pi10(), p.pi11()}}};
                             })
      .def("to_json", [](const FitResult& f) { return to_json(f).dump(); })
      .def_static("from_json", [](const std::string& s) { return fit_from_json(json::parse(s)); })
      .def("__repr__", [](const FitResult& f) {
        return "<FitResult m=" + std::to_string(f.m) + " elbo=" + std::to_string(f.log_evidence_bound) + ">";
      });

  mod.def(
      "simulate",
      [](int n, double c, double u, double l, std::uint64_t seed, int replicate) {
        SimulationConfig cfg;
        cfg.n = n;
        cfg.c = c;
        cfg.u = u;
        cfg.l = l;
        cfg.seed = seed;
        cfg.replicates = replicate + 1;
        cfg.validate();
        const auto d = sample_dataset(cfg, replicate);
        py::dict out;
        out["x"] = d.x;
        out["s"] = d.s.values();
        out["t_theoretical"] = theoretical_posterior(d.x, cfg).values();
        return out;
      },
      py::arg("n") = 100, py::arg("c") = 5.0, py::arg("u") = 0.05, py::arg("l") = 0.6, py::arg("seed") = 0,
      py::arg("replicate") = 0, "One simulated series with labels and the exact null-class posterior.");

  mod.def(
      "fit",
      [](const std::vector<double>& data, int m, double null_mean, double null_sd, double tol, int max_iter,
         int restarts, std::uint64_t seed, bool stationary, double q0) {
        py::gil_scoped_release release;
        return fit(data, m, NullDensity(null_mean, null_sd), PriorSpec::defaults(m),
                   make_config(tol, max_iter, restarts, seed, stationary, q0));
      },
      py::arg("data"), py::arg("m"), py::arg("null_mean") = 0.0, py::arg("null_sd") = 1.0, py::arg("tol") = 1e-6,
      py::arg("max_iter") = 500, py::arg("restarts") = 5, py::arg("seed") = 0, py::arg("stationary") = true,
      py::arg("q0") = 0.5, "Variational Bayes EM for the model with m alternative components.");

  mod.def(
      "fit_collection",
      [](const std::vector<double>& data, const std::vector<int>& components, double null_mean, double null_sd,
         double tol, int max_iter, int restarts, std::uint64_t seed, int jobs) {
        py::gil_scoped_release release;
        return fit_collection(data, components, NullDensity(null_mean, null_sd), PriorSpec::defaults,
                              make_config(tol, max_iter, restarts, seed, true, 0.5), jobs);
      },
      py::arg("data"), py::arg("components"), py::arg("null_mean") = 0.0, py::arg("null_sd") = 1.0,
      py::arg("tol") = 1e-6, py::arg("max_iter") = 500, py::arg("restarts") = 5, py::arg("seed") = 0,
      py::arg("jobs") = 1);

  mod.def(
      "vb_weights",
      [](const std::vector<FitResult>& fits, std::optional<std::vector<double>> prior) {
        return weights_dict(vb_weights(fits, prior_or_uniform(prior, fits.size())));
      },
      py::arg("fits"), py::arg("prior") = py::none());

  mod.def(
      "pe_weights",
      [](const std::vector<FitResult>& fits, const std::vector<double>& data, std::optional<std::vector<double>> prior) {
        return weights_dict(pe_weights(fits, prior_or_uniform(prior, fits.size()), data));
      },
      py::arg("fits"), py::arg("data"), py::arg("prior") = py::none());

  mod.def(
      "is_weights",
      [](const std::vector<FitResult>& fits, const std::vector<double>& data, int samples, std::uint64_t seed,
         std::optional<std::vector<double>> prior) {
        ISWeights w = [&] {
          py::gil_scoped_release release;
          return is_weights(fits, prior_or_uniform(prior, fits.size()), data, {samples, seed});
        }();
        auto d = weights_dict(w.weights);
        std::vector<double> le, se, ess;
        for (const auto& e : w.per_model) {
          le.push_back(e.log_evidence);
          se.push_back(e.log_se);
          ess.push_back(e.ess);
        }
        d["log_evidence"] = le;
        d["log_se"] = se;
        d["ess"] = ess;
        return d;
      },
      py::arg("fits"), py::arg("data"), py::arg("samples") = 1000, py::arg("seed") = 0, py::arg("prior") = py::none());

  mod.def(
      "oracle_weights",
      [](const std::vector<double>& truth, const std::vector<std::vector<double>>& tracks) {
        std::vector<PosteriorTrack> ts;
        for (const auto& t : tracks) ts.emplace_back(t, "model");
        return weights_dict(oracle_weights(PosteriorTrack(truth, "truth"), ts));
      },
      py::arg("truth"), py::arg("tracks"));

  mod.def(
      "averaged_posterior",
      [](const std::vector<FitResult>& fits, const std::vector<double>& weights) {
        return averaged_posterior(fits, weights_from(weights, ids_of(fits))).values();
      },
      py::arg("fits"), py::arg("weights"), "Weighted null-class probability track.");

  mod.def(
      "classify",
      [](const std::vector<double>& track, double threshold) {
        return classify(PosteriorTrack(track, "track"), threshold).values();
      },
      py::arg("track"), py::arg("threshold") = 0.5);

  mod.def(
      "forward_backward",
      [](const Eigen::VectorXd& init, const Eigen::MatrixXd& trans, const Eigen::MatrixXd& table) {
        const auto s = forward_backward({init, trans, table});
        py::dict d;
        d["marginals"] = py::cast(s.marginals, py::return_value_policy::copy);
        d["pair_counts"] = py::cast(s.pair_counts, py::return_value_policy::copy);
        d["log_normalizer"] = s.log_normalizer;
        return d;
      },
      py::arg("log_init"), py::arg("log_trans"), py::arg("log_emissions"));

  mod.def(
      "total_variation",
      [](const std::vector<double>& a, const std::vector<double>& b) {
        std::vector<int> ids(a.size());
        for (std::size_t i = 0; i < ids.size(); ++i) ids[i] = static_cast<int>(i) + 1;
        return total_variation(weights_from(a, ids), weights_from(b, ids));
      },
      py::arg("a"), py::arg("b"));

  mod.def(
      "benchmark",
      [](double c, double u, double l, int n, int replicates, std::uint64_t seed, int max_components,
         int is_samples, int jobs) {
        SimulationConfig sim;
        sim.c = c;
        sim.u = u;
        sim.l = l;
        sim.n = n;
        sim.replicates = replicates;
        sim.seed = seed;
        BenchmarkOptions opt;
        opt.max_components = max_components;
        opt.is_samples = is_samples;
        opt.jobs = jobs;
        BenchmarkReport r = [&] {
          py::gil_scoped_release release;
          return run_benchmark(sim, opt);
        }();
        return as_python(to_json(r));
      },
      py::arg("c") = 5.0, py::arg("u") = 0.05, py::arg("l") = 0.6, py::arg("n") = 100, py::arg("replicates") = 10,
      py::arg("seed") = 0, py::arg("max_components") = 7, py::arg("is_samples") = 1000, py::arg("jobs") = 1);

  mod.def(
      "cli",
      [](const std::vector<std::string>& args) {
        py::gil_scoped_release release;
        return cli::run(args);
      },
      py::arg("args"), "Runs the command-line tool in-process; returns its exit code.");
}
