#include <iostream>

#include <CLI11.hpp>

#include "rkhslab/csv.hpp"
#include "rkhslab/error.hpp"
#include "rkhslab_cli/runner.hpp"

namespace rkhslab::cli {
namespace {

void emit(const nlohmann::ordered_json& report, const std::optional<std::filesystem::path>& path) {
  if (path) {
    write_report(*path, report);
  } else {
    std::cout << dump_report(report);
  }
}

std::optional<std::filesystem::path> report_path(const std::string& flag, const RunConfig& cfg) {
  if (!flag.empty()) return std::filesystem::path(flag);
  return cfg.output.report;
}

}  // namespace

int run_main(int argc, char** argv) {
  CLI::App app{"Numerical toolkit for reproducing kernel Hilbert spaces and integral transforms"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_path;
  std::string data_path;

  auto* verify = app.add_subcommand("verify", "Run the identity suite and write a JSON report");
  verify->add_option("--config", config_path, "Run configuration (JSON)")->required();
  verify->add_option("--out", out_path, "Report path (default: output.report, else stdout)");

  auto* invert = app.add_subcommand("invert", "Recover F from data sampled on grid_E");
  invert->add_option("--config", config_path, "Run configuration (JSON)")->required();
  invert->add_option("--data", data_path, "Data CSV on grid_E")->required();
  invert->add_option("--out", out_path, "Output CSV on grid_T")->required();

  auto* analyze = app.add_subcommand("analyze", "Report the weighted-L2 verdict for the kernel");
  analyze->add_option("--config", config_path, "Run configuration (JSON)")->required();
  analyze->add_option("--out", out_path, "Report path (default: output.report, else stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    const RunConfig cfg = load_config(config_path);
    if (verify->parsed() || analyze->parsed()) {
      const RunResult r = verify->parsed() ? run_verify(cfg) : run_analyze(cfg);
      emit(r.report, report_path(out_path, cfg));
      if (r.exit_code != kExitOk) {
        std::cerr << "rkhslab: one or more criteria failed\n";
      }
      return r.exit_code;
    }
    const InvertResult r = run_invert(cfg, data_path);
    if (r.recovered) {
      try {
        csv::write_samples(out_path, *r.grid_t, *r.recovered);
      } catch (const Error& e) {
        throw ConfigError(e.what());
      }
    }
    std::cout << dump_report(r.summary);
    if (cfg.output.report) write_report(*cfg.output.report, r.summary);
    if (r.exit_code != kExitOk) {
      std::cerr << "rkhslab: " << r.summary.value("message", std::string("inversion failed")) << "\n";
    }
    return r.exit_code;
  } catch (const ConfigError& e) {
    std::cerr << "rkhslab: " << e.what() << "\n";
    return kExitConfig;
  }
}

}  // namespace rkhslab::cli
