#include "rkhslab_cli/config.hpp"

#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

#include "rkhslab/error.hpp"

namespace rkhslab::cli {
namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& field, const std::string& message) {
  throw ConfigError("config field '" + field + "': " + message);
}

void reject_unknown(const json& obj, const std::string& where,
                    std::initializer_list<std::string_view> known) {
  for (const auto& [key, value] : obj.items()) {
    bool found = false;
    for (auto k : known) found = found || key == k;
    if (!found) fail(where.empty() ? key : where + "." + key, "unknown field");
  }
}

const json& require_object(const json& v, const std::string& field) {
  if (!v.is_object()) fail(field, "expected an object");
  return v;
}

double get_number(const json& v, const std::string& field) {
  if (!v.is_number()) fail(field, "expected a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) fail(field, "must be finite");
  return x;
}

std::uint64_t get_unsigned(const json& v, const std::string& field) {
  if (!v.is_number_unsigned()) fail(field, "expected a non-negative integer");
  return v.get<std::uint64_t>();
}

std::string get_string(const json& v, const std::string& field) {
  if (!v.is_string()) fail(field, "expected a string");
  return v.get<std::string>();
}

double positive(const json& v, const std::string& field) {
  const double x = get_number(v, field);
  if (!(x > 0.0)) fail(field, "must be positive");
  return x;
}

double unit_open(const json& v, const std::string& field) {
  const double x = get_number(v, field);
  if (!(x > 0.0 && x < 1.0)) fail(field, "must lie in (0, 1)");
  return x;
}

DensitySpec parse_density(const json& v, const std::string& field) {
  require_object(v, field);
  reject_unknown(v, field, {"name", "params"});
  if (!v.contains("name")) fail(field + ".name", "missing");
  DensitySpec d;
  d.name = get_string(v["name"], field + ".name");
  std::size_t arity = 0;
  if (d.name == "constant") {
    arity = 1;
  } else if (d.name == "linear" || d.name == "exponential") {
    arity = 2;
  } else {
    fail(field + ".name", "unknown density '" + d.name + "' (constant, linear, exponential)");
  }
  d.params.clear();
  if (!v.contains("params")) {
    if (d.name != "constant") fail(field + ".params", "missing");
    d.params = {1.0};
    return d;
  }
  const json& p = v["params"];
  if (!p.is_array() || p.size() != arity) {
    fail(field + ".params", "expected an array of " + std::to_string(arity) + " numbers");
  }
  for (std::size_t i = 0; i < arity; ++i) {
    d.params.push_back(get_number(p[i], field + ".params[" + std::to_string(i) + "]"));
  }
  return d;
}

GridSpec parse_grid(const json& v, const std::string& field) {
  require_object(v, field);
  reject_unknown(v, field, {"interval", "n", "rule", "density"});
  GridSpec g;
  if (!v.contains("interval")) fail(field + ".interval", "missing");
  const json& iv = v["interval"];
  if (!iv.is_array() || iv.size() != 2) fail(field + ".interval", "expected [lower, upper]");
  g.lower = get_number(iv[0], field + ".interval[0]");
  g.upper = get_number(iv[1], field + ".interval[1]");
  if (!(g.lower < g.upper)) fail(field + ".interval", "lower must be below upper");
  if (!v.contains("n")) fail(field + ".n", "missing");
  const std::uint64_t n = get_unsigned(v["n"], field + ".n");
  if (n < 1) fail(field + ".n", "must be at least 1");
  g.n = static_cast<Eigen::Index>(n);
  if (v.contains("rule")) {
    try {
      g.rule = parse_rule(get_string(v["rule"], field + ".rule"));
    } catch (const Error& e) {
      fail(field + ".rule", e.what());
    }
  }
  if (v.contains("density")) g.density = parse_density(v["density"], field + ".density");
  return g;
}

KernelSpec parse_kernel(const json& v) {
  require_object(v, "kernel");
  reject_unknown(v, "kernel", {"name", "band", "sigma", "length"});
  if (!v.contains("name")) fail("kernel.name", "missing");
  KernelSpec k;
  k.name = get_string(v["name"], "kernel.name");
  static const std::set<std::string> names{"brownian", "sinc", "gaussian", "exponential",
                                           "constant", "negative_constant", "delta"};
  if (!names.contains(k.name)) fail("kernel.name", "unknown kernel '" + k.name + "'");
  if (v.contains("band")) k.band = positive(v["band"], "kernel.band");
  if (v.contains("sigma")) k.sigma = positive(v["sigma"], "kernel.sigma");
  if (v.contains("length")) k.length = positive(v["length"], "kernel.length");
  return k;
}

FeatureFamily parse_feature(const json& v) {
  require_object(v, "feature");
  reject_unknown(v, "feature", {"family", "band", "sigma", "modes"});
  if (!v.contains("family")) fail("feature.family", "missing");
  FeatureFamily f;
  try {
    f.kind = parse_family(get_string(v["family"], "feature.family"));
  } catch (const Error& e) {
    fail("feature.family", e.what());
  }
  if (v.contains("band")) f.band = get_number(v["band"], "feature.band");
  if (v.contains("sigma")) f.sigma = get_number(v["sigma"], "feature.sigma");
  if (v.contains("modes")) f.modes = static_cast<Eigen::Index>(get_unsigned(v["modes"], "feature.modes"));
  try {
    f.validate();
  } catch (const Error& e) {
    fail("feature", e.what());
  }
  return f;
}

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
  std::filesystem::path path(p);
  if (path.is_relative()) path = base / path;
  return path.lexically_normal();
}

nlohmann::ordered_json grid_json(const GridSpec& g) {
  nlohmann::ordered_json out;
  out["interval"] = {g.lower, g.upper};
  out["n"] = g.n;
  out["rule"] = std::string(to_string(g.rule));
  if (g.density) {
    nlohmann::ordered_json d;
    d["name"] = g.density->name;
    d["params"] = g.density->params;
    out["density"] = d;
  }
  return out;
}

}  // namespace

bool RunConfig::has_feature_source() const noexcept {
  return std::holds_alternative<FeatureFamily>(source) ||
         std::holds_alternative<FeatureCsvSpec>(source);
}

std::string_view source_kind(const SourceSpec& source) noexcept {
  switch (source.index()) {
    case 0: return "kernel";
    case 1: return "feature";
    case 2: return "kernel_csv";
    default: return "feature_csv";
  }
}

RunConfig parse_config(const json& doc, const std::filesystem::path& base_dir) {
  if (!doc.is_object()) throw ConfigError("config must be a JSON object");
  reject_unknown(doc, "", {"schema_version", "grid_E", "grid_T", "kernel", "feature", "kernel_csv",
                           "feature_csv", "tolerances", "trials", "point_eval_trials", "seed",
                           "output"});
  if (doc.contains("schema_version")) {
    if (get_unsigned(doc["schema_version"], "schema_version") != kSchemaVersion) {
      fail("schema_version", "unsupported version (expected " + std::to_string(kSchemaVersion) + ")");
    }
  }

  RunConfig cfg;
  cfg.base_dir = base_dir;

  std::vector<std::string> sources;
  for (const char* key : {"kernel", "feature", "kernel_csv", "feature_csv"}) {
    if (doc.contains(key)) sources.emplace_back(key);
  }
  if (sources.empty()) {
    throw ConfigError("config declares no source: exactly one of 'kernel', 'feature', "
                      "'kernel_csv', 'feature_csv' is required");
  }
  if (sources.size() > 1) {
    std::ostringstream os;
    os << "config declares conflicting sources:";
    for (const auto& s : sources) os << " '" << s << "'";
    os << " (exactly one is allowed)";
    throw ConfigError(os.str());
  }
  const std::string& src = sources.front();
  if (src == "kernel") {
    cfg.source = parse_kernel(doc["kernel"]);
  } else if (src == "feature") {
    cfg.source = parse_feature(doc["feature"]);
  } else if (src == "kernel_csv") {
    cfg.source = KernelCsvSpec{resolve(base_dir, get_string(doc["kernel_csv"], "kernel_csv"))};
  } else {
    cfg.source = FeatureCsvSpec{resolve(base_dir, get_string(doc["feature_csv"], "feature_csv"))};
  }

  if (!doc.contains("grid_E")) fail("grid_E", "missing");
  cfg.grid_e = parse_grid(doc["grid_E"], "grid_E");
  if (doc.contains("grid_T")) cfg.grid_t = parse_grid(doc["grid_T"], "grid_T");
  if (cfg.has_feature_source() && !cfg.grid_t) fail("grid_T", "required by a feature source");
  if (!cfg.has_feature_source() && cfg.grid_t) fail("grid_T", "only meaningful for a feature source");

  if (doc.contains("tolerances")) {
    const json& t = require_object(doc["tolerances"], "tolerances");
    reject_unknown(t, "tolerances", {"cutoff_rel", "tol_psd", "tol_diag", "range_tol"});
    if (t.contains("cutoff_rel")) cfg.tolerances.cutoff_rel = unit_open(t["cutoff_rel"], "tolerances.cutoff_rel");
    if (t.contains("tol_psd")) cfg.tolerances.tol_psd = unit_open(t["tol_psd"], "tolerances.tol_psd");
    if (t.contains("tol_diag")) cfg.tolerances.tol_diag = unit_open(t["tol_diag"], "tolerances.tol_diag");
    if (t.contains("range_tol")) cfg.tolerances.range_tol = unit_open(t["range_tol"], "tolerances.range_tol");
  }
  if (doc.contains("trials")) {
    cfg.trials = get_unsigned(doc["trials"], "trials");
    if (cfg.trials < 1) fail("trials", "must be at least 1");
  }
  if (doc.contains("point_eval_trials")) {
    cfg.point_eval_trials = get_unsigned(doc["point_eval_trials"], "point_eval_trials");
    if (cfg.point_eval_trials < 1) fail("point_eval_trials", "must be at least 1");
  }
  if (doc.contains("seed")) cfg.seed = get_unsigned(doc["seed"], "seed");
  if (doc.contains("output")) {
    const json& o = require_object(doc["output"], "output");
    reject_unknown(o, "output", {"report", "kernel_csv"});
    if (o.contains("report")) cfg.output.report = resolve(base_dir, get_string(o["report"], "output.report"));
    if (o.contains("kernel_csv")) {
      cfg.output.kernel_csv = resolve(base_dir, get_string(o["kernel_csv"], "output.kernel_csv"));
    }
  }
  return cfg;
}

void apply_seed_override(RunConfig& config) {
  const char* env = std::getenv("RKHSLAB_SEED");
  if (env == nullptr || *env == '\0') return;
  const std::string_view text(env);
  std::uint64_t seed = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), seed);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw ConfigError("RKHSLAB_SEED must be a non-negative integer, got '" + std::string(text) + "'");
  }
  config.seed = seed;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file '" + path.string() + "'");
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("config file '" + path.string() + "' is not valid JSON: " + e.what());
  }
  const auto base = std::filesystem::absolute(path).parent_path();
  RunConfig cfg = parse_config(doc, base);
  apply_seed_override(cfg);
  return cfg;
}

nlohmann::ordered_json echo_config(const RunConfig& c) {
  nlohmann::ordered_json out;
  out["schema_version"] = kSchemaVersion;
  out["grid_E"] = grid_json(c.grid_e);
  if (c.grid_t) out["grid_T"] = grid_json(*c.grid_t);
  std::visit(
      [&out](const auto& s) {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, KernelSpec>) {
          nlohmann::ordered_json k;
          k["name"] = s.name;
          if (s.name == "sinc") k["band"] = s.band;
          if (s.name == "gaussian") k["sigma"] = s.sigma;
          if (s.name == "exponential") k["length"] = s.length;
          out["kernel"] = k;
        } else if constexpr (std::is_same_v<T, FeatureFamily>) {
          nlohmann::ordered_json f;
          f["family"] = std::string(to_string(s.kind));
          switch (s.kind) {
            case FeatureFamilyKind::fourier: f["band"] = s.band; break;
            case FeatureFamilyKind::gaussian: f["sigma"] = s.sigma; break;
            case FeatureFamilyKind::orthonormal_diagonal: f["modes"] = s.modes; break;
            case FeatureFamilyKind::indicator: break;
          }
          out["feature"] = f;
        } else if constexpr (std::is_same_v<T, KernelCsvSpec>) {
          out["kernel_csv"] = s.path.string();
        } else {
          out["feature_csv"] = s.path.string();
        }
      },
      c.source);
  out["tolerances"] = {{"cutoff_rel", c.tolerances.cutoff_rel},
                       {"tol_psd", c.tolerances.tol_psd},
                       {"tol_diag", c.tolerances.tol_diag},
                       {"range_tol", c.tolerances.range_tol}};
  out["trials"] = c.trials;
  out["point_eval_trials"] = c.point_eval_trials;
  out["seed"] = c.seed;
  return out;
}

Grid build_grid(const GridSpec& spec) {
  Density density;
  if (spec.density) {
    const auto& d = *spec.density;
    const auto p = d.params;
    if (d.name == "constant") {
      density = [c = p[0]](double) { return c; };
    } else if (d.name == "linear") {
      density = [a = p[0], b = p[1]](double t) { return a + b * t; };
    } else {
      density = [a = p[0], b = p[1]](double t) { return a * std::exp(b * t); };
    }
  }
  try {
    return make_uniform_grid(spec.lower, spec.upper, spec.n, spec.rule, density);
  } catch (const Error& e) {
    throw ConfigError(std::string("invalid grid: ") + e.what());
  }
}

}  // namespace rkhslab::cli
