#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

#include "commands.hpp"
#include "vbma/io.hpp"
#include "vbma/serialize.hpp"

using namespace vbma;
namespace fs = std::filesystem;

namespace {

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("vbma_cli_" + std::to_string(::getpid()) + "_" +
            ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  int run(std::vector<std::string> args) { return cli::run(args); }
  std::string path(const std::string& name) const { return (dir_ / name).string(); }
  void series(const std::string& name, const std::vector<double>& x, const std::string& header = "x") {
    std::ofstream out(dir_ / name);
    if (!header.empty()) out << header << "\n";
    for (double v : x) out << format_double(v) << "\n";
  }
  std::vector<double> simulated(int n, std::uint64_t seed) {
    SimulationConfig c;
    c.n = n;
    c.u = 0.3;
    c.c = 15;
    c.seed = seed;
    return sample_dataset(c, 0).x;
  }

  fs::path dir_;
};

}  // namespace

TEST(CliParsing, Components) {
  EXPECT_EQ(cli::parse_components("1..4"), (std::vector<int>{1, 2, 3, 4}));
  EXPECT_EQ(cli::parse_components("3"), (std::vector<int>{3}));
  EXPECT_EQ(cli::parse_components("1,3"), (std::vector<int>{1, 3}));
  EXPECT_THROW(cli::parse_components("0..2"), Error);
  EXPECT_THROW(cli::parse_components("a"), Error);
  EXPECT_EQ(cli::parse_doubles("5,15"), (std::vector<double>{5, 15}));
}

TEST_F(Cli, SimulateSingleReplicateAndReproducible) {
  ASSERT_EQ(run({"--seed", "4", "--out-dir", path("a"), "simulate", "--replicates", "1", "--n", "30"}), 0);
  ASSERT_EQ(run({"--seed", "4", "--out-dir", path("b"), "simulate", "--replicates", "1", "--n", "30"}), 0);
  EXPECT_TRUE(fs::exists(path("a/sim_000.csv")));
  EXPECT_FALSE(fs::exists(path("a/sim_001.csv")));
  EXPECT_EQ(read_text(path("a/sim_000.csv")), read_text(path("b/sim_000.csv")));
  const auto text = read_text(path("a/sim_000.csv"));
  EXPECT_EQ(text.substr(0, text.find('\n')), "t,x,s_true,t_theoretical");
  EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 31);
  const auto m = json::parse(read_text(path("a/simulate.manifest.json")));
  EXPECT_EQ(m.at("seed"), 4);
  EXPECT_EQ(m.at("config").at("n"), 30);
}

TEST_F(Cli, FitThenAverage) {
  series("x.csv", simulated(60, 1));
  ASSERT_EQ(run({"--out-dir", path("fits"), "fit", path("x.csv"), "--components", "1..3"}), 0);
  for (int m = 1; m <= 3; ++m) EXPECT_TRUE(fs::exists(path("fits/fit_m" + std::to_string(m) + ".json")));
  const auto f1 = fit_from_json(json::parse(read_text(path("fits/fit_m1.json"))));
  EXPECT_EQ(f1.m, 1);

  ASSERT_EQ(run({"--out-dir", path("one"), "average", path("fits/fit_m1.json"), "--weights", "vb"}), 0);
  const auto w = json::parse(read_text(path("one/weights.json")));
  EXPECT_EQ(w.at("weights").at("VB").at("values")[0], 1.0);
  const auto track = read_text(path("one/track_vb.csv"));
  const auto second = track.substr(track.find('\n') + 1);
  EXPECT_EQ(second.substr(0, second.find('\n')),
            "1," + format_double(model_track(f1)[0]) + "," + (model_track(f1)[0] >= 0.5 ? "0" : "1"));

  ASSERT_EQ(run({"--out-dir", path("all"), "--seed", "2", "average", path("fits/fit_m1.json"),
                 path("fits/fit_m2.json"), path("fits/fit_m3.json"), "--is-samples", "200"}),
            0);
  const auto all = json::parse(read_text(path("all/weights.json")));
  for (const char* k : {"VB", "PE", "IS"}) {
    EXPECT_TRUE(all.at("weights").contains(k));
    EXPECT_TRUE(all.at("weights").at(k).contains("entropy"));
  }
  EXPECT_EQ(all.at("is_estimates").size(), 3u);
  EXPECT_TRUE(fs::exists(path("all/track_pe.csv")));
}

TEST_F(Cli, ReplayReproducesOutputs) {
  series("x.csv", simulated(50, 2));
  ASSERT_EQ(run({"--out-dir", path("r1"), "--seed", "9", "fit", path("x.csv"), "--components", "1,2"}), 0);
  ASSERT_EQ(run({"replay", path("r1/fit.manifest.json"), "--out-dir", path("r2")}), 0);
  EXPECT_EQ(read_text(path("r1/fit_m2.json")), read_text(path("r2/fit_m2.json")));
  const auto m = json::parse(read_text(path("r2/fit.manifest.json")));
  EXPECT_EQ(m.at("command"), "fit");
}

TEST_F(Cli, ModelPriorFile) {
  series("x.csv", simulated(40, 3));
  ASSERT_EQ(run({"--out-dir", path("f"), "fit", path("x.csv"), "--components", "1,2"}), 0);
  std::ofstream(path("prior.json")) << R"({"1": 0.999999, "2": 0.000001})";
  ASSERT_EQ(run({"--out-dir", path("a"), "average", path("f/fit_m1.json"), path("f/fit_m2.json"), "--weights", "vb",
                 "--model-prior", path("prior.json")}),
            0);
  const auto w = json::parse(read_text(path("a/weights.json")));
  EXPECT_GT(w.at("weights").at("VB").at("values")[0].get<double>(), 0.99);
}

TEST_F(Cli, ExitCodes) {
  series("x.csv", {1.0, 2.0, 0.0, 3.0});
  EXPECT_EQ(run({"--out-dir", path("o"), "analyze", path("x.csv"), "--log-transform"}), 3);
  EXPECT_EQ(run({"--out-dir", path("o"), "fit", path("missing.csv")}), 3);
  std::ofstream(path("bad.csv")) << "x\n1\nfoo\n";
  EXPECT_EQ(run({"--out-dir", path("o"), "fit", path("bad.csv")}), 3);
  EXPECT_EQ(run({"fit", path("x.csv"), "--components", "0"}), 2);
  EXPECT_EQ(run({"bogus"}), 2);
  EXPECT_EQ(run({}), 2);
  EXPECT_EQ(run({"--help"}), 0);
  EXPECT_EQ(run({"--format", "xml", "simulate"}), 2);
  series("y.csv", simulated(40, 5));
  EXPECT_EQ(run({"--out-dir", path("s"), "fit", path("y.csv"), "--components", "2", "--max-iter", "1", "--strict"}), 4);
  EXPECT_EQ(run({"--out-dir", path("s"), "fit", path("y.csv"), "--components", "2", "--max-iter", "1"}), 0);
}

TEST_F(Cli, BenchmarkSmoke) {
  ASSERT_EQ(run({"--out-dir", path("b"), "benchmark", "--replicates", "1", "--c", "5,15", "--u", "0.3",
                 "--is-samples", "50", "--max-components", "3"}),
            0);
  const auto j = json::parse(read_text(path("b/benchmark.json")));
  ASSERT_EQ(j.at("reports").size(), 2u);
  EXPECT_EQ(j.at("reports")[1].at("config").at("c"), 15.0);
  EXPECT_TRUE(fs::exists(path("b/benchmark.csv")));
}

TEST_F(Cli, AnalyzeOutputs) {
  std::vector<double> x = simulated(80, 6);
  for (auto& v : x) v = std::exp(v);
  series("x.csv", x, "rate");
  ASSERT_EQ(run({"--out-dir", path("a"), "analyze", path("x.csv"), "--log-transform", "--max-components", "2"}), 0);
  const auto table = read_text(path("a/analyze.csv"));
  EXPECT_EQ(table.substr(0, table.find('\n')), "t,x,log_x,T_avg,label");
  const auto r = json::parse(read_text(path("a/analyze.json")));
  EXPECT_EQ(r.at("n"), 80);
  EXPECT_TRUE(r.at("transition").contains("pi00"));
  EXPECT_EQ(r.at("models").size(), 2u);
  ASSERT_EQ(run({"--format", "json", "--out-dir", path("j"), "analyze", path("x.csv"), "--log-transform",
                 "--max-components", "1"}),
            0);
  const auto cols = json::parse(read_text(path("j/analyze.json")));
  EXPECT_TRUE(cols.contains("track"));
}
