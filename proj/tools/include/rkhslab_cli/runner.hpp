#pragma once

#include <filesystem>
#include <optional>
#include <string>

#include <json.hpp>

#include "rkhslab/transform.hpp"
#include "rkhslab_cli/config.hpp"

namespace rkhslab::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitCheckFailed = 1;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitRange = 3;

/// Objects assembled from a configuration.
struct Problem {
  Grid grid_e;
  std::optional<Grid> grid_t;
  KernelMatrix kernel;
  std::optional<TransformOperator> op;
  std::optional<FeatureFamily> family;
};

/// Throws ConfigError when the declared objects cannot be built.
Problem build_problem(const RunConfig& config);

struct RunResult {
  int exit_code = kExitOk;
  nlohmann::ordered_json report;
};

/// Full identity suite. Exit 0 when every judged criterion passes, else 1.
/// Throws ConfigError for invalid inputs.
RunResult run_verify(const RunConfig& config);

/// Weighted-L2 verdict and PSD check only. Exit 1 when the PSD check fails.
RunResult run_analyze(const RunConfig& config);

struct InvertResult {
  int exit_code = kExitOk;
  nlohmann::ordered_json summary;
  std::optional<DiscreteFunction> recovered;
  /// Grid on which `recovered` is sampled.
  std::optional<Grid> grid_t;
};

/// Recovers F from data sampled on grid_E. Exit 3 on a range violation or a
/// non-injective transform.
InvertResult run_invert(const RunConfig& config, const std::filesystem::path& data_csv);

/// Copy of a report with the `timings` member removed.
nlohmann::ordered_json without_timings(nlohmann::ordered_json report);

std::string dump_report(const nlohmann::ordered_json& report);

void write_report(const std::filesystem::path& path, const nlohmann::ordered_json& report);

/// Command-line entry point shared by the executable and the tests.
int run_main(int argc, char** argv);

}  // namespace rkhslab::cli
