#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "rkhslab/features.hpp"
#include "rkhslab/grid.hpp"
#include "rkhslab/kernel.hpp"

namespace rkhslab::cli {

inline constexpr int kSchemaVersion = 1;

/// Raised for anything wrong with the run configuration or its inputs.
/// Maps to exit code 2.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Named quadrature densities. Parameters:
///   constant     [c]        c
///   linear       [a, b]     a + b t
///   exponential  [a, b]     a exp(b t)
struct DensitySpec {
  std::string name = "constant";
  std::vector<double> params{1.0};
};

struct GridSpec {
  double lower = 0.0;
  double upper = 1.0;
  Eigen::Index n = 0;
  QuadratureRule rule = QuadratureRule::trapezoid;
  std::optional<DensitySpec> density;
};

/// Built-in kernel functions on E = [a, b]:
///   brownian           min(p, q) - a
///   sinc               sin(band (p - q)) / (pi (p - q))
///   gaussian           exp(-(p - q)^2 / (2 sigma^2))
///   exponential        exp(-|p - q| / length)
///   constant           1
///   negative_constant  -1
///   delta              diag(1 / w)
struct KernelSpec {
  std::string name;
  double band = 3.141592653589793;
  double sigma = 1.0;
  double length = 1.0;
};

struct KernelCsvSpec {
  std::filesystem::path path;
};

struct FeatureCsvSpec {
  std::filesystem::path path;
};

using SourceSpec = std::variant<KernelSpec, FeatureFamily, KernelCsvSpec, FeatureCsvSpec>;

struct Tolerances {
  double cutoff_rel = 1e-12;
  double tol_psd = 1e-10;
  double tol_diag = 1e-8;
  double range_tol = 1e-6;
};

struct OutputSpec {
  std::optional<std::filesystem::path> report;
  std::optional<std::filesystem::path> kernel_csv;
};

struct RunConfig {
  GridSpec grid_e;
  std::optional<GridSpec> grid_t;
  SourceSpec source;
  Tolerances tolerances;
  std::size_t trials = 100;
  std::size_t point_eval_trials = 1000;
  std::uint64_t seed = 0;
  OutputSpec output;
  /// Relative paths in the config resolve against this directory.
  std::filesystem::path base_dir;

  bool has_feature_source() const noexcept;
};

/// Parses and validates a configuration document.
RunConfig parse_config(const nlohmann::json& doc, const std::filesystem::path& base_dir);

/// Reads a configuration file. Honours the RKHSLAB_SEED override.
RunConfig load_config(const std::filesystem::path& path);

/// Replaces the seed when RKHSLAB_SEED is set to a valid integer.
void apply_seed_override(RunConfig& config);

/// The effective configuration, in the same schema as the input.
nlohmann::ordered_json echo_config(const RunConfig& config);

Grid build_grid(const GridSpec& spec);

std::string_view source_kind(const SourceSpec& source) noexcept;

}  // namespace rkhslab::cli
