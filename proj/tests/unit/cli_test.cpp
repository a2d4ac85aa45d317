#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "rkhslab/csv.hpp"
#include "rkhslab/random.hpp"
#include "rkhslab/transform.hpp"
#include "rkhslab_cli/config.hpp"
#include "rkhslab_cli/runner.hpp"

namespace rkhslab::cli {
namespace {

namespace fs = std::filesystem;

const fs::path kData = RKHSLAB_TEST_DATA;

struct Outcome {
  int exit_code = -1;
  std::string out;
  std::string err;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
    dir_ = fs::temp_directory_path() / (std::string("rkhslab_cli_") + info->name());
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  Outcome run(const std::string& args, const std::string& env = {}) const {
    const fs::path out = dir_ / "stdout.txt";
    const fs::path err = dir_ / "stderr.txt";
    const std::string cmd = env + " '" + std::string(RKHSLAB_BINARY) + "' " + args + " >'" +
                            out.string() + "' 2>'" + err.string() + "'";
    const int status = std::system(cmd.c_str());
    Outcome o;
    o.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    o.out = slurp(out);
    o.err = slurp(err);
    return o;
  }

  fs::path path(const std::string& name) const { return dir_ / name; }

  static nlohmann::ordered_json read_json(const fs::path& p) {
    std::ifstream in(p);
    return nlohmann::ordered_json::parse(in);
  }

  static const nlohmann::ordered_json* criterion(const nlohmann::ordered_json& report,
                                                 const std::string& name) {
    for (const auto& c : report["criteria"]) {
      if (c["name"] == name) return &c;
    }
    return nullptr;
  }

  fs::path dir_;
};

TEST_F(CliTest, VerifyIndicatorFamilyPasses) {
  const auto o = run("verify --config '" + (kData / "indicator_200.json").string() + "' --out '" +
                     path("report.json").string() + "'");
  ASSERT_EQ(o.exit_code, 0) << o.err;
  const auto report = read_json(path("report.json"));
  EXPECT_EQ(report["schema_version"], 1);
  EXPECT_EQ(report["command"], "verify");
  EXPECT_TRUE(report["passed"].get<bool>());
  EXPECT_LE(report["transform"]["identities"]["factorization_residual"].get<double>(), 1e-14);
  const auto* fac = criterion(report, "factorization");
  ASSERT_NE(fac, nullptr);
  EXPECT_EQ((*fac)["tolerance"].get<double>(), 1e-14);
  EXPECT_EQ((*fac)["status"], "pass");
  // Every judged residual carries its tolerance.
  for (const auto& c : report["criteria"]) {
    if (c["status"] != "skipped") {
      EXPECT_TRUE(c.contains("value") && c.contains("tolerance")) << c.dump();
    }
  }
  EXPECT_FALSE(report["weighted_l2"]["is_weighted_l2"].get<bool>());
  EXPECT_TRUE(report.contains("timings"));
}

TEST_F(CliTest, TwoSourcesIsConfigError) {
  const auto o = run("verify --config '" + (kData / "two_sources.json").string() + "' --out '" +
                     path("report.json").string() + "'");
  EXPECT_EQ(o.exit_code, 2);
  EXPECT_NE(o.err.find("'kernel'"), std::string::npos) << o.err;
  EXPECT_NE(o.err.find("'feature'"), std::string::npos) << o.err;
  EXPECT_FALSE(fs::exists(path("report.json")));
}

TEST_F(CliTest, ConfigErrors) {
  EXPECT_EQ(run("verify --config '" + path("missing.json").string() + "'").exit_code, 2);
  {
    std::ofstream(path("bad.json")) << R"({"grid_E": {"interval": [0, 1], "n": 5}, "kernel": {"name": "brownian"}, "colour": 1})";
  }
  auto o = run("verify --config '" + path("bad.json").string() + "'");
  EXPECT_EQ(o.exit_code, 2);
  EXPECT_NE(o.err.find("colour"), std::string::npos);
  {
    std::ofstream(path("tol.json")) << R"({"grid_E": {"interval": [0, 1], "n": 5}, "kernel": {"name": "brownian"}, "tolerances": {"cutoff_rel": 1.5}})";
  }
  EXPECT_EQ(run("verify --config '" + path("tol.json").string() + "'").exit_code, 2);
  {
    std::ofstream(path("trials.json")) << R"({"grid_E": {"interval": [0, 1], "n": 5}, "kernel": {"name": "brownian"}, "trials": 0})";
  }
  EXPECT_EQ(run("verify --config '" + path("trials.json").string() + "'").exit_code, 2);
  EXPECT_EQ(run("frobnicate").exit_code, 2);
}

TEST_F(CliTest, NegativeKernelFailsPsd) {
  const auto o = run("verify --config '" + (kData / "negative_constant.json").string() + "' --out '" +
                     path("report.json").string() + "'");
  EXPECT_EQ(o.exit_code, 1);
  const auto report = read_json(path("report.json"));
  EXPECT_FALSE(report["psd"]["pass"].get<bool>());
  EXPECT_EQ((*criterion(report, "psd"))["status"], "fail");
  EXPECT_EQ((*criterion(report, "reproducing"))["status"], "skipped");
  EXPECT_FALSE(report["passed"].get<bool>());
}

TEST_F(CliTest, AnalyzeReportsVerdict) {
  auto o = run("analyze --config '" + (kData / "orthonormal_32.json").string() + "'");
  ASSERT_EQ(o.exit_code, 0) << o.err;
  const auto report = nlohmann::ordered_json::parse(o.out);
  EXPECT_EQ(report["command"], "analyze");
  EXPECT_TRUE(report["weighted_l2"]["is_weighted_l2"].get<bool>());
  EXPECT_EQ(report["weighted_l2"]["weight_w"].size(), 32u);
  o = run("analyze --config '" + (kData / "negative_constant.json").string() + "'");
  EXPECT_EQ(o.exit_code, 1);
}

TEST_F(CliTest, VerifyKernelWithDensityPasses) {
  const auto o = run("verify --config '" + (kData / "brownian_density.json").string() + "' --out '" +
                     path("report.json").string() + "'");
  ASSERT_EQ(o.exit_code, 0) << o.err;
  const auto report = read_json(path("report.json"));
  EXPECT_EQ(report["rkhs"]["point_evaluation"]["violations"], 0);
  EXPECT_NEAR(report["grids"]["E"]["total_weight"].get<double>(), 1.25, 1e-12);
}

TEST_F(CliTest, InvertRoundTrip) {
  const RunConfig cfg = load_config(kData / "indicator_40.json");
  const Problem pb = build_problem(cfg);
  SeededRng rng(99);
  const DiscreteFunction F(*pb.grid_t, rng.gaussian_vector(40, true));
  const DiscreteFunction f = apply_forward(*pb.op, F);
  csv::write_samples(path("data.csv"), pb.grid_e, f);

  const auto o = run("invert --config '" + (kData / "indicator_40.json").string() + "' --data '" +
                     path("data.csv").string() + "' --out '" + path("F.csv").string() + "'");
  ASSERT_EQ(o.exit_code, 0) << o.err;
  const auto summary = nlohmann::ordered_json::parse(o.out);
  EXPECT_LE(summary["range_residual"].get<double>(), 1e-8);
  const DiscreteFunction back = csv::read_function(path("F.csv"), *pb.grid_t);
  const RVector& m = pb.grid_t->weights();
  EXPECT_LE(weighted_norm(back.values() - F.values(), m) / weighted_norm(F.values(), m), 1e-6);
}

TEST_F(CliTest, InvertZeroData) {
  const RunConfig cfg = load_config(kData / "indicator_40.json");
  const Problem pb = build_problem(cfg);
  csv::write_samples(path("zero.csv"), pb.grid_e, DiscreteFunction::zero(pb.grid_e));
  const auto o = run("invert --config '" + (kData / "indicator_40.json").string() + "' --data '" +
                     path("zero.csv").string() + "' --out '" + path("F.csv").string() + "'");
  ASSERT_EQ(o.exit_code, 0) << o.err;
  const auto back = csv::read_samples(path("F.csv"));
  ASSERT_EQ(back.size(), 40u);
  for (const auto& s : back) EXPECT_EQ(s.value, cplx(0.0, 0.0));
}

TEST_F(CliTest, InvertRankOneOutOfRange) {
  const RunConfig cfg = load_config(kData / "rank_one.json");
  const Problem pb = build_problem(cfg);
  csv::write_samples(path("ramp.csv"), pb.grid_e,
                     DiscreteFunction::sample(pb.grid_e, [](double p) { return cplx(p, 0.0); }));
  const auto o = run("invert --config '" + (kData / "rank_one.json").string() + "' --data '" +
                     path("ramp.csv").string() + "' --out '" + path("F.csv").string() + "'");
  EXPECT_EQ(o.exit_code, 3);
  const auto summary = nlohmann::ordered_json::parse(o.out);
  EXPECT_EQ(summary["status"], "range_violation");
  EXPECT_GE(summary["range_residual"].get<double>(), 0.1);
  EXPECT_FALSE(fs::exists(path("F.csv")));
}

TEST_F(CliTest, InvertMisalignedDataIsConfigError) {
  const Grid other = make_uniform_grid(0.0, 1.0, 40, QuadratureRule::trapezoid);
  csv::write_samples(path("data.csv"), other, DiscreteFunction::zero(other));
  const auto o = run("invert --config '" + (kData / "indicator_40.json").string() + "' --data '" +
                     path("data.csv").string() + "' --out '" + path("F.csv").string() + "'");
  EXPECT_EQ(o.exit_code, 2);
  const auto k = run("invert --config '" + (kData / "negative_constant.json").string() + "' --data '" +
                     path("data.csv").string() + "' --out '" + path("F.csv").string() + "'");
  EXPECT_EQ(k.exit_code, 2);
}

TEST_F(CliTest, ReportsAreDeterministic) {
  const std::string cfg = (kData / "indicator_40.json").string();
  ASSERT_EQ(run("verify --config '" + cfg + "' --out '" + path("a.json").string() + "'").exit_code, 0);
  ASSERT_EQ(run("verify --config '" + cfg + "' --out '" + path("b.json").string() + "'").exit_code, 0);
  const auto a = without_timings(read_json(path("a.json")));
  const auto b = without_timings(read_json(path("b.json")));
  EXPECT_EQ(dump_report(a), dump_report(b));
  // Timing values differ between runs; nothing else may.
  EXPECT_TRUE(read_json(path("a.json")).contains("timings"));
}

TEST_F(CliTest, EnvironmentSeedOverridesConfig) {
  const std::string cfg = (kData / "indicator_40.json").string();
  ASSERT_EQ(run("verify --config '" + cfg + "' --out '" + path("a.json").string() + "'", "RKHSLAB_SEED=123").exit_code, 0);
  const auto a = read_json(path("a.json"));
  EXPECT_EQ(a["seed"], 123);
  EXPECT_EQ(a["config"]["seed"], 123);
  ASSERT_EQ(run("verify --config '" + cfg + "' --out '" + path("b.json").string() + "'").exit_code, 0);
  EXPECT_EQ(read_json(path("b.json"))["seed"], 11);
  EXPECT_EQ(run("verify --config '" + cfg + "'", "RKHSLAB_SEED=abc").exit_code, 2);
}

TEST(ParseConfig, DefaultsAndEcho) {
  const auto doc = nlohmann::json::parse(R"({"grid_E": {"interval": [0, 2], "n": 8}, "kernel": {"name": "sinc", "band": 2}})");
  const RunConfig cfg = parse_config(doc, "/tmp");
  EXPECT_EQ(cfg.trials, 100u);
  EXPECT_EQ(cfg.point_eval_trials, 1000u);
  EXPECT_EQ(cfg.tolerances.cutoff_rel, 1e-12);
  EXPECT_EQ(cfg.tolerances.range_tol, 1e-6);
  EXPECT_EQ(cfg.grid_e.rule, QuadratureRule::trapezoid);
  const auto echo = echo_config(cfg);
  EXPECT_EQ(echo["kernel"]["band"], 2.0);
  // The echo parses back to the same effective configuration.
  const RunConfig again = parse_config(nlohmann::json::parse(echo.dump()), "/tmp");
  EXPECT_EQ(echo_config(again).dump(), echo.dump());
}

TEST(ParseConfig, FeatureSourceNeedsGridT) {
  const auto doc = nlohmann::json::parse(R"({"grid_E": {"interval": [0, 1], "n": 8}, "feature": {"family": "indicator"}})");
  EXPECT_THROW(parse_config(doc, "/tmp"), ConfigError);
}

TEST(ParseConfig, DensityWhitelist) {
  auto doc = nlohmann::json::parse(R"({"grid_E": {"interval": [0, 1], "n": 8, "density": {"name": "cubic", "params": [1]}}, "kernel": {"name": "brownian"}})");
  EXPECT_THROW(parse_config(doc, "/tmp"), ConfigError);
  doc["grid_E"]["density"] = {{"name", "exponential"}, {"params", {2.0, -1.0}}};
  const RunConfig cfg = parse_config(doc, "/tmp");
  const Grid g = build_grid(cfg.grid_e);
  EXPECT_NEAR(g.weight(0), 2.0 / 14.0, 1e-15);
}

}  // namespace
}  // namespace rkhslab::cli
