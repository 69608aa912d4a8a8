#include "commands.hpp"

#include <chrono>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <iomanip>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "vbma/benchmark.hpp"
#include "vbma/common.hpp"
#include "vbma/io.hpp"
#include "vbma/serialize.hpp"
#include "vbma/version.hpp"

namespace fs = std::filesystem;

namespace vbma::cli {

namespace {

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(text);
  while (std::getline(in, cur, sep)) out.push_back(cur);
  if (!text.empty() && text.back() == sep) out.emplace_back();
  return out;
}

double to_double(const std::string& s, const std::string& what) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    throw usage_error(what + ": not a number: '" + s + "'");
  }
  if (used != s.size()) throw usage_error(what + ": not a number: '" + s + "'");
  return v;
}

int to_int(const std::string& s, const std::string& what) {
  std::size_t used = 0;
  int v = 0;
  try {
    v = std::stoi(s, &used);
  } catch (const std::exception&) {
    throw usage_error(what + ": not an integer: '" + s + "'");
  }
  if (used != s.size()) throw usage_error(what + ": not an integer: '" + s + "'");
  return v;
}

std::array<double, 2> parse_pair(const std::string& text, const std::string& what) {
  const auto v = parse_doubles(text);
  if (v.size() != 2) throw usage_error(what + " expects two comma-separated numbers");
  return {v[0], v[1]};
}

std::string timestamp() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  std::ostringstream os;
  os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return os.str();
}

struct Globals {
  std::uint64_t seed = 0;
  int jobs = 1;
  std::string out_dir = ".";
  std::string format = "csv";
};

struct VbemFlags {
  double tol = 1e-6;
  int max_iter = 500;
  int restarts = 5;

  void add(CLI::App* cmd) {
    cmd->add_option("--tol", tol, "Relative ELBO change for convergence")->capture_default_str();
    cmd->add_option("--max-iter", max_iter, "VBEM iteration cap")->capture_default_str();
    cmd->add_option("--restarts", restarts, "VBEM restarts per model")->capture_default_str();
  }
  VBEMConfig config(std::uint64_t seed) const {
    VBEMConfig c;
    c.tol = tol;
    c.max_iter = max_iter;
    c.restarts = restarts;
    c.seed = seed;
    if (!(tol > 0.0) || max_iter < 1 || restarts < 1) throw usage_error("invalid VBEM settings");
    return c;
  }
};

struct PriorFlags {
  std::string row0 = "1,1";
  std::string row1 = "1,1";
  double props = 1.0;
  std::string gamma = "0.01,0.01";
  double mean = 0.0;
  double scale = 0.01;

  void add(CLI::App* cmd) {
    cmd->add_option("--prior-row0", row0, "Dirichlet prior of (pi00, pi01)")->capture_default_str();
    cmd->add_option("--prior-row1", row1, "Dirichlet prior of (pi10, pi11)")->capture_default_str();
    cmd->add_option("--prior-props", props, "Dirichlet concentration of the proportions")->capture_default_str();
    cmd->add_option("--prior-gamma", gamma, "Gamma shape,rate of the precision")->capture_default_str();
    cmd->add_option("--prior-mean", mean, "Prior mean of the component means")->capture_default_str();
    cmd->add_option("--prior-scale", scale, "Prior scale of the component means")->capture_default_str();
  }
  std::function<PriorSpec(int)> factory() const {
    const auto r0 = parse_pair(row0, "--prior-row0");
    const auto r1 = parse_pair(row1, "--prior-row1");
    const auto g = parse_pair(gamma, "--prior-gamma");
    const double a = props, mu = mean, beta = scale;
    auto make = [=](int m) {
      PriorSpec p = PriorSpec::defaults(m);
      p.dir_row0 = r0;
      p.dir_row1 = r1;
      p.dir_props.assign(static_cast<std::size_t>(m), a);
      p.gamma_shape = g[0];
      p.gamma_rate = g[1];
      p.ng_mean = mu;
      p.ng_scale = beta;
      p.validate();
      return p;
    };
    make(1);
    return make;
  }
};

class Run {
 public:
  Run(std::string command, const std::vector<std::string>& argv, const Globals& g)
      : command_(std::move(command)), argv_(argv), globals_(g), started_(timestamp()) {
    out_dir_ = fs::absolute(g.out_dir);
    fs::create_directories(out_dir_);
  }

  const fs::path& out_dir() const { return out_dir_; }
  void input(const fs::path& p) { inputs_.push_back(fs::absolute(p).string()); }
  void write(const std::string& name, const std::string& contents) {
    const fs::path p = out_dir_ / name;
    write_atomic(p, contents);
    outputs_.push_back(p.string());
  }
  void finish(const json& config) {
    json m{{"command", command_},
           {"argv", argv_},
           {"cwd", fs::current_path().string()},
           {"config", config},
           {"seed", globals_.seed},
           {"jobs", globals_.jobs},
           {"format", globals_.format},
           {"version", kVersion},
           {"started_at", started_},
           {"finished_at", timestamp()},
           {"inputs", inputs_},
           {"outputs", outputs_}};
    write_atomic(out_dir_ / (command_ + ".manifest.json"), m.dump(2) + "\n");
  }

 private:
  std::string command_;
  std::vector<std::string> argv_;
  Globals globals_;
  std::string started_;
  fs::path out_dir_;
  std::vector<std::string> inputs_;
  std::vector<std::string> outputs_;
};

std::string csv_or_json_table(const std::vector<std::string>& columns, const std::vector<std::vector<std::string>>& rows,
                              const std::string& format) {
  if (format == "json") {
    json cols = json::object();
    for (std::size_t c = 0; c < columns.size(); ++c) {
      json col = json::array();
      for (const auto& r : rows) {
        const auto& cell = r[c];
        if (cell == "NA")
          col.push_back(nullptr);
        else
          col.push_back(std::stod(cell));
      }
      cols[columns[c]] = col;
    }
    return cols.dump(2) + "\n";
  }
  std::string s;
  for (std::size_t c = 0; c < columns.size(); ++c) s += (c ? "," : "") + columns[c];
  s += "\n";
  for (const auto& r : rows) {
    for (std::size_t c = 0; c < r.size(); ++c) s += (c ? "," : "") + r[c];
    s += "\n";
  }
  return s;
}

std::string table_ext(const std::string& format) { return format == "json" ? ".json" : ".csv"; }

NullDensity parse_null(const std::string& text) {
  const auto p = parse_pair(text, "--null");
  return NullDensity(p[0], p[1]);
}

std::vector<double> read_data(const std::string& path, const std::string& column) {
  return column.empty() ? read_series_csv(path) : read_csv_column(path, column);
}

std::vector<double> log_transform(const std::vector<double>& x) {
  std::vector<std::size_t> bad;
  std::vector<double> out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0))
      bad.push_back(i + 1);
    else
      out[i] = std::log(x[i]);
  }
  if (!bad.empty()) {
    std::string msg = "log transform needs positive values; offending rows:";
    for (std::size_t k = 0; k < bad.size() && k < 20; ++k) msg += " " + std::to_string(bad[k]);
    if (bad.size() > 20) msg += " ...";
    throw data_error(msg);
  }
  return out;
}

std::vector<double> load_model_prior(const std::string& spec, const std::vector<int>& ids) {
  if (spec == "uniform") return uniform_model_prior(ids.size());
  const json j = json::parse(read_text(spec));
  std::vector<double> p;
  if (j.is_array()) {
    p = j.get<std::vector<double>>();
  } else if (j.is_object()) {
    for (int m : ids) {
      const auto key = std::to_string(m);
      if (!j.contains(key)) throw data_error("model prior has no entry for m=" + key);
      p.push_back(j.at(key).get<double>());
    }
  } else {
    throw data_error("model prior must be a JSON array or object");
  }
  if (p.size() != ids.size()) throw data_error("model prior length does not match the number of fits");
  double s = 0.0;
  for (double v : p) {
    if (!(v > 0.0) || !std::isfinite(v)) throw data_error("model prior entries must be positive");
    s += v;
  }
  for (double& v : p) v /= s;
  return p;
}

std::string label_cell(const LabelSequence& s, std::size_t t) { return std::to_string(s.values()[t]); }

// ---- simulate ----

struct SimulateOpts {
  int n = 100;
  int replicates = 100;
  double c = 5.0;
  double u = 0.05;
  double l = 0.6;
};

void cmd_simulate(const SimulateOpts& o, const Globals& g, const std::vector<std::string>& argv) {
  SimulationConfig cfg{o.n, o.replicates, o.c, o.u, o.l, g.seed};
  cfg.validate();
  Run run("simulate", argv, g);
  const int width = std::max<int>(3, static_cast<int>(std::to_string(cfg.replicates - 1).size()));
  for (int r = 0; r < cfg.replicates; ++r) {
    const auto d = sample_dataset(cfg, r);
    const auto th = theoretical_posterior(d.x, cfg);
    std::vector<std::vector<std::string>> rows;
    for (std::size_t t = 0; t < d.x.size(); ++t)
      rows.push_back({std::to_string(t + 1), format_double(d.x[t]), label_cell(d.s, t), format_double(th[t])});
    std::ostringstream name;
    name << "sim_" << std::setw(width) << std::setfill('0') << r << table_ext(g.format);
    run.write(name.str(), csv_or_json_table({"t", "x", "s_true", "t_theoretical"}, rows, g.format));
  }
  run.finish(to_json(cfg));
  std::cout << "simulate: wrote " << cfg.replicates << " replicate(s) to " << run.out_dir().string() << "\n";
}

// ---- fit ----

struct FitOpts {
  std::string data;
  std::string components = "1..7";
  std::string null = "0,1";
  std::string column;
  bool strict = false;
  bool log = false;
  VbemFlags vbem;
  PriorFlags prior;
};

int cmd_fit(const FitOpts& o, const Globals& g, const std::vector<std::string>& argv) {
  const auto ms = parse_components(o.components);
  const NullDensity null = parse_null(o.null);
  const auto make_prior = o.prior.factory();
  const auto cfg = o.vbem.config(g.seed);
  Run run("fit", argv, g);
  run.input(o.data);
  auto x = read_data(o.data, o.column);
  if (o.log) x = log_transform(x);
  if (x.size() < 2) throw data_error("need at least two observations");
  const auto fits = fit_collection(x, ms, null, make_prior, cfg, g.jobs);
  int unconverged = 0;
  for (const auto& f : fits) {
    json j = to_json(f);
    j["data"] = x;
    run.write("fit_m" + std::to_string(f.m) + ".json", j.dump(2) + "\n");
    std::cout << "fit: m=" << f.m << " elbo=" << format_double(f.log_evidence_bound)
              << " iterations=" << f.iterations << (f.converged ? "" : " (not converged)") << "\n";
    if (!f.converged) ++unconverged;
  }
  run.finish({{"data", fs::absolute(o.data).string()},
              {"components", ms},
              {"null", to_json(null)},
              {"log_transform", o.log},
              {"strict", o.strict},
              {"vbem", to_json(cfg)},
              {"prior", to_json(make_prior(1))}});
  if (o.strict && unconverged > 0) {
    std::cerr << "vbma: " << unconverged << " model(s) did not converge\n";
    return 4;
  }
  return 0;
}

// ---- average ----

struct AverageOpts {
  std::vector<std::string> fits;
  std::string weights = "all";
  int is_samples = 1000;
  std::string model_prior = "uniform";
  double threshold = 0.5;
};

void cmd_average(const AverageOpts& o, const Globals& g, const std::vector<std::string>& argv) {
  if (o.fits.empty()) throw usage_error("average needs at least one fit file");
  std::vector<WeightKind> kinds;
  if (o.weights == "all")
    kinds = {WeightKind::VB, WeightKind::PE, WeightKind::IS};
  else
    kinds = {weight_kind_from_string(o.weights)};
  for (auto k : kinds)
    if (k == WeightKind::ORACLE) throw usage_error("oracle weights need the true posterior; use benchmark");
  if (o.is_samples < 1) throw usage_error("--is-samples must be positive");

  Run run("average", argv, g);
  std::vector<FitResult> fits;
  std::vector<double> data;
  std::vector<int> ids;
  for (const auto& path : o.fits) {
    run.input(path);
    const json j = json::parse(read_text(path));
    fits.push_back(fit_from_json(j));
    if (!j.contains("data")) throw data_error(path + ": fit file carries no data");
    auto x = j.at("data").get<std::vector<double>>();
    if (fits.size() == 1)
      data = std::move(x);
    else if (x != data)
      throw data_error(path + ": fit was made on different data");
    if (fits.back().n() != data.size()) throw data_error(path + ": data length does not match the fit");
    ids.push_back(fits.back().m);
  }
  const auto prior_m = load_model_prior(o.model_prior, ids);

  json report{{"model_ids", ids}, {"model_prior", prior_m}, {"weights", json::object()}};
  for (auto kind : kinds) {
    std::optional<WeightVector> w;
    if (kind == WeightKind::VB) {
      w = vb_weights(fits, prior_m);
    } else if (kind == WeightKind::PE) {
      w = pe_weights(fits, prior_m, data);
    } else {
      const auto is = is_weights(fits, prior_m, data, {o.is_samples, g.seed});
      w = is.weights;
      json est = json::array();
      for (const auto& e : is.per_model)
        est.push_back({{"log_evidence", e.log_evidence}, {"log_se", e.log_se}, {"ess", e.ess}});
      report["is_estimates"] = est;
    }
    json entry = to_json(*w);
    entry["entropy"] = entropy(*w);
    const std::string name(to_string(kind));
    report["weights"][name] = entry;

    const auto track = averaged_posterior(fits, *w);
    const auto labels = classify(track, o.threshold);
    std::vector<std::vector<std::string>> rows;
    for (std::size_t t = 0; t < track.size(); ++t)
      rows.push_back({std::to_string(t + 1), format_double(track[t]), label_cell(labels, t)});
    std::string lower = name;
    for (auto& ch : lower) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
    run.write("track_" + lower + table_ext(g.format), csv_or_json_table({"t", "T", "label"}, rows, g.format));
    std::cout << "average: " << name << " weights";
    for (double v : w->values()) std::cout << " " << format_double(v);
    std::cout << " entropy=" << format_double(entropy(*w)) << "\n";
  }
  run.write("weights.json", report.dump(2) + "\n");
  std::vector<std::string> abs;
  for (const auto& f : o.fits) abs.push_back(fs::absolute(f).string());
  run.finish({{"fits", abs},
              {"weights", o.weights},
              {"is_samples", o.is_samples},
              {"model_prior", o.model_prior},
              {"threshold", o.threshold}});
}

// ---- benchmark ----

struct BenchmarkOpts {
  std::string c = "5";
  std::string u = "0.05";
  double l = 0.6;
  int n = 100;
  int replicates = 100;
  int max_components = 7;
  int is_samples = 1000;
  double threshold = 0.5;
  std::string band = "0.2,0.8";
  std::string orientation = "interest";
  bool select_by_vb = false;
  VbemFlags vbem;
};

void cmd_benchmark(const BenchmarkOpts& o, const Globals& g, const std::vector<std::string>& argv) {
  const auto cs = parse_doubles(o.c);
  const auto us = parse_doubles(o.u);
  if (cs.empty() || us.empty()) throw usage_error("empty grid");
  BenchmarkOptions opt;
  opt.max_components = o.max_components;
  opt.vbem = o.vbem.config(g.seed);
  opt.is_samples = o.is_samples;
  opt.threshold = o.threshold;
  const auto b = parse_pair(o.band, "--band");
  opt.band.low = b[0];
  opt.band.high = b[1];
  if (!(b[0] < b[1]) || b[0] < 0.0 || b[1] > 1.0) throw usage_error("--band needs 0 <= low < high <= 1");
  if (o.orientation == "interest")
    opt.band.orientation = BandOrientation::InterestClass;
  else if (o.orientation == "null")
    opt.band.orientation = BandOrientation::NullClass;
  else
    throw usage_error("--band-orientation must be interest or null");
  opt.select_by_vb = o.select_by_vb;
  opt.jobs = g.jobs;
  if (o.is_samples < 1 || o.max_components < 1) throw usage_error("invalid benchmark settings");

  std::vector<SimulationConfig> grid;
  for (double c : cs)
    for (double u : us) {
      SimulationConfig s{o.n, o.replicates, c, u, o.l, g.seed};
      s.validate();
      grid.push_back(s);
    }

  Run run("benchmark", argv, g);
  std::vector<BenchmarkReport> reports;
  json all = json::array();
  for (const auto& s : grid) {
    reports.push_back(run_benchmark(s, opt));
    const auto& r = reports.back();
    all.push_back(to_json(r));
    std::cout << "benchmark: c=" << format_double(s.c) << " u=" << format_double(s.u) << " ok=" << r.replicates_ok
              << " failed=" << r.replicates_failed;
    for (Method m : {Method::VB, Method::PE, Method::IS})
      std::cout << " mse_" << to_string(m) << "=" << format_double(r.methods.at(m).mse.mean);
    std::cout << "\n";
  }
  run.write("benchmark.json", json{{"reports", all}}.dump(2) + "\n");
  if (g.format == "csv") run.write("benchmark.csv", benchmark_csv(reports));
  run.finish({{"c", cs},
              {"u", us},
              {"l", o.l},
              {"n", o.n},
              {"replicates", o.replicates},
              {"max_components", o.max_components},
              {"is_samples", o.is_samples},
              {"threshold", o.threshold},
              {"band", {b[0], b[1]}},
              {"band_orientation", o.orientation},
              {"select_by_vb", o.select_by_vb},
              {"vbem", to_json(opt.vbem)},
              {"simulation_null", {{"mean", 0.0}, {"sd", 1.0}}}});
}

// ---- analyze ----

struct AnalyzeOpts {
  std::string data;
  std::string null = "0,1";
  std::string column;
  int max_components = 6;
  bool log = false;
  double threshold = 0.5;
  VbemFlags vbem;
  PriorFlags prior;
};

void cmd_analyze(const AnalyzeOpts& o, const Globals& g, const std::vector<std::string>& argv) {
  if (o.max_components < 1) throw usage_error("--max-components must be at least 1");
  const NullDensity null = parse_null(o.null);
  const auto make_prior = o.prior.factory();
  const auto cfg = o.vbem.config(g.seed);
  Run run("analyze", argv, g);
  run.input(o.data);
  const auto raw = read_data(o.data, o.column);
  const auto x = o.log ? log_transform(raw) : raw;
  if (x.size() < 2) throw data_error("need at least two observations");

  std::vector<int> ms;
  for (int m = 1; m <= o.max_components; ++m) ms.push_back(m);
  const auto fits = fit_collection(x, ms, null, make_prior, cfg, g.jobs);
  const auto w = vb_weights(fits, uniform_model_prior(fits.size()));
  const auto track = averaged_posterior(fits, w);
  const auto labels = classify(track, o.threshold);

  double p00 = 0.0, p01 = 0.0, p10 = 0.0, p11 = 0.0;
  json models = json::array();
  for (std::size_t k = 0; k < fits.size(); ++k) {
    const auto& f = fits[k];
    p00 += w[k] * f.point_pi.pi00();
    p01 += w[k] * f.point_pi.pi01();
    p10 += w[k] * f.point_pi.pi10();
    p11 += w[k] * f.point_pi.pi11();
    models.push_back({{"m", f.m},
                      {"elbo", f.log_evidence_bound},
                      {"weight", w[k]},
                      {"converged", f.converged},
                      {"iterations", f.iterations},
                      {"transition", to_json(f.point_pi)},
                      {"alternative", to_json(f.point_alt)}});
  }
  std::size_t abnormal = 0;
  for (int v : labels.values()) abnormal += v == 1;

  std::vector<std::vector<std::string>> rows;
  for (std::size_t t = 0; t < x.size(); ++t)
    rows.push_back({std::to_string(t + 1), format_double(raw[t]), o.log ? format_double(x[t]) : "NA",
                    format_double(track[t]), label_cell(labels, t)});
  run.write("analyze" + table_ext(g.format), csv_or_json_table({"t", "x", "log_x", "T_avg", "label"}, rows, g.format));

  json report{{"n", x.size()},
              {"weights", to_json(w)},
              {"entropy", entropy(w)},
              {"transition", {{"pi00", p00}, {"pi01", p01}, {"pi10", p10}, {"pi11", p11}}},
              {"abnormal_count", abnormal},
              {"threshold", o.threshold},
              {"models", models},
              {"track", to_json(track)}};
  run.write("analyze.json", report.dump(2) + "\n");
  run.finish({{"data", fs::absolute(o.data).string()},
              {"null", to_json(null)},
              {"max_components", o.max_components},
              {"log_transform", o.log},
              {"threshold", o.threshold},
              {"vbem", to_json(cfg)},
              {"prior", to_json(make_prior(1))}});
  std::cout << "analyze: n=" << x.size() << " weights";
  for (double v : w.values()) std::cout << " " << format_double(v);
  std::cout << " transition=((" << format_double(p00) << ", " << format_double(p01) << "), (" << format_double(p10)
            << ", " << format_double(p11) << "))\n";
}

int exit_code(ErrorKind k) {
  switch (k) {
    case ErrorKind::Usage: return 2;
    case ErrorKind::Data: return 3;
    case ErrorKind::Numeric: return 4;
  }
  return 4;
}

int dispatch(const std::vector<std::string>& args, int depth);

int replay(const std::string& manifest_path, const std::string& out_override, int depth) {
  if (depth > 0) throw usage_error("a replayed manifest cannot itself be a replay");
  const json m = json::parse(read_text(manifest_path));
  auto argv = m.at("argv").get<std::vector<std::string>>();
  const fs::path cwd = m.at("cwd").get<std::string>();
  if (!out_override.empty()) {
    argv.push_back("--out-dir");
    argv.push_back(fs::absolute(out_override).string());
  }
  const fs::path here = fs::current_path();
  fs::current_path(cwd);
  int code = 0;
  try {
    code = dispatch(argv, depth + 1);
  } catch (...) {
    fs::current_path(here);
    throw;
  }
  fs::current_path(here);
  return code;
}

int dispatch(const std::vector<std::string>& args, int depth) {
  CLI::App app{"Variational Bayesian model averaging for binary HMM classification", "vbma"};
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  app.require_subcommand(1);
  app.set_version_flag("--version", kVersion);

  Globals g;
  app.add_option("--seed", g.seed, "Master random seed")->capture_default_str();
  app.add_option("--jobs", g.jobs, "Concurrent fits or replicates")->capture_default_str();
  app.add_option("--out-dir", g.out_dir, "Output directory")->capture_default_str();
  app.add_option("--format", g.format, "Encoding of tabular outputs")
      ->check(CLI::IsMember({"json", "csv"}))
      ->capture_default_str();

  SimulateOpts so;
  auto* sim = app.add_subcommand("simulate", "Simulate replicate series with their theoretical posteriors");
  sim->fallthrough();
  sim->add_option("--n", so.n, "Series length")->capture_default_str();
  sim->add_option("--replicates", so.replicates, "Number of replicates")->capture_default_str();
  sim->add_option("--c", so.c, "Alternative concentration c >= 1")->capture_default_str();
  sim->add_option("--u", so.u, "Stationary probability of the alternative")->capture_default_str();
  sim->add_option("--l", so.l, "Mixing parameter of the transition matrix")->capture_default_str();

  FitOpts fo;
  auto* fitc = app.add_subcommand("fit", "Fit the models of a collection to one series");
  fitc->fallthrough();
  fitc->add_option("data", fo.data, "Single-column CSV")->required();
  fitc->add_option("--components", fo.components, "Model sizes, e.g. 1..6 or 1,3")->capture_default_str();
  fitc->add_option("--null", fo.null, "Null mean,sd")->capture_default_str();
  fitc->add_option("--column", fo.column, "Column to read from a CSV with a header");
  fitc->add_flag("--strict", fo.strict, "Exit 4 when a model does not converge");
  fitc->add_flag("--log-transform", fo.log, "Fit log(x)");
  fo.vbem.add(fitc);
  fo.prior.add(fitc);

  AverageOpts ao;
  auto* avg = app.add_subcommand("average", "Weight and average fitted models");
  avg->fallthrough();
  avg->add_option("fits", ao.fits, "Fit JSON files")->required();
  avg->add_option("--weights", ao.weights, "vb, pe, is or all")
      ->check(CLI::IsMember({"vb", "pe", "is", "all", "VB", "PE", "IS"}))
      ->capture_default_str();
  avg->add_option("--is-samples", ao.is_samples, "Importance samples per model")->capture_default_str();
  avg->add_option("--model-prior", ao.model_prior, "uniform or a JSON file")->capture_default_str();
  avg->add_option("--threshold", ao.threshold, "Null-class probability threshold")->capture_default_str();

  BenchmarkOpts bo;
  auto* bench = app.add_subcommand("benchmark", "Simulation study over a (c, u) grid");
  bench->fallthrough();
  bench->add_option("--c", bo.c, "Comma-separated c values")->capture_default_str();
  bench->add_option("--u", bo.u, "Comma-separated u values")->capture_default_str();
  bench->add_option("--l", bo.l, "Mixing parameter")->capture_default_str();
  bench->add_option("--n", bo.n, "Series length")->capture_default_str();
  bench->add_option("--replicates", bo.replicates, "Replicates per configuration")->capture_default_str();
  bench->add_option("--max-components", bo.max_components, "Largest model of the collection")->capture_default_str();
  bench->add_option("--is-samples", bo.is_samples, "Importance samples per model")->capture_default_str();
  bench->add_option("--threshold", bo.threshold, "Null-class probability threshold")->capture_default_str();
  bench->add_option("--band", bo.band, "MSE band low,high")->capture_default_str();
  bench->add_option("--band-orientation", bo.orientation, "interest or null")->capture_default_str();
  bench->add_flag("--select-by-vb", bo.select_by_vb, "Select the single model by VB weight");
  bo.vbem.add(bench);

  AnalyzeOpts zo;
  auto* ana = app.add_subcommand("analyze", "Fit, weight, average and classify one series");
  ana->fallthrough();
  ana->add_option("data", zo.data, "Single-column CSV")->required();
  ana->add_option("--column", zo.column, "Column to read from a CSV with a header");
  ana->add_option("--null", zo.null, "Null mean,sd")->capture_default_str();
  ana->add_option("--max-components", zo.max_components, "Largest model")->capture_default_str();
  ana->add_flag("--log-transform", zo.log, "Analyze log(x)");
  ana->add_option("--threshold", zo.threshold, "Null-class probability threshold")->capture_default_str();
  zo.vbem.add(ana);
  zo.prior.add(ana);

  std::string manifest;
  auto* rep = app.add_subcommand("replay", "Rerun a command from its manifest");
  rep->fallthrough();
  rep->add_option("manifest", manifest, "Manifest JSON")->required();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }
  if (g.jobs < 1) throw usage_error("--jobs must be at least 1");

  if (rep->parsed()) {
    const bool override = app.get_option("--out-dir")->count() > 0;
    return replay(manifest, override ? g.out_dir : std::string(), depth);
  }
  if (sim->parsed()) cmd_simulate(so, g, args);
  if (fitc->parsed()) return cmd_fit(fo, g, args);
  if (avg->parsed()) cmd_average(ao, g, args);
  if (bench->parsed()) cmd_benchmark(bo, g, args);
  if (ana->parsed()) cmd_analyze(zo, g, args);
  return 0;
}

}  // namespace

std::vector<int> parse_components(const std::string& text) {
  std::vector<int> out;
  const auto dots = text.find("..");
  if (dots != std::string::npos) {
    const int lo = to_int(text.substr(0, dots), "--components");
    const int hi = to_int(text.substr(dots + 2), "--components");
    if (lo < 1 || hi < lo) throw usage_error("--components range must satisfy 1 <= lo <= hi");
    for (int m = lo; m <= hi; ++m) out.push_back(m);
    return out;
  }
  for (const auto& part : split(text, ',')) {
    const int m = to_int(part, "--components");
    if (m < 1) throw usage_error("--components entries must be positive");
    out.push_back(m);
  }
  if (out.empty()) throw usage_error("--components is empty");
  return out;
}

std::vector<double> parse_doubles(const std::string& text) {
  std::vector<double> out;
  for (const auto& part : split(text, ',')) out.push_back(to_double(part, "list"));
  return out;
}

int run(const std::vector<std::string>& args) {
  try {
    return dispatch(args, 0);
  } catch (const Error& e) {
    std::cerr << "vbma: " << e.what() << "\n";
    return exit_code(e.kind());
  } catch (const json::exception& e) {
    std::cerr << "vbma: malformed JSON: " << e.what() << "\n";
    return 3;
  } catch (const fs::filesystem_error& e) {
    std::cerr << "vbma: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "vbma: " << e.what() << "\n";
    return 4;
  }
}

}  // namespace vbma::cli
