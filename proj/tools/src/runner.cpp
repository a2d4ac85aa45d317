#include "rkhslab_cli/runner.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <functional>
#include <limits>
#include <numbers>

#include "rkhslab/analysis.hpp"
#include "rkhslab/csv.hpp"
#include "rkhslab/error.hpp"
#include "rkhslab/random.hpp"
#include "rkhslab/rkhs.hpp"

namespace rkhslab::cli {
namespace {

using ojson = nlohmann::ordered_json;
using Clock = std::chrono::steady_clock;

// Identity tolerances that are fixed by the verification contract rather
// than configurable.
constexpr double kFactorizationTol = 1e-14;
constexpr double kIdentityTol = 1e-8;
constexpr double kReproducingTol = 1e-8;
constexpr double kReproducingTolIllConditioned = 1e-6;
constexpr double kConditionBound = 1e8;
constexpr double kEqualityTol = 1e-10;
constexpr double kSectionNormTol = 1e-8;
constexpr double kSymmetryTol = 1e-12;
constexpr double kRkhsInversionTol = 1e-6;
constexpr double kL2InversionTol = 1e-6;

double elapsed_ms(Clock::time_point since) {
  return std::chrono::duration<double, std::milli>(Clock::now() - since).count();
}

KernelFunction builtin_kernel(const KernelSpec& k, double lower) {
  if (k.name == "brownian") {
    return [lower](double p, double q) { return cplx(std::min(p, q) - lower, 0.0); };
  }
  if (k.name == "sinc") {
    return [b = k.band](double p, double q) {
      const double d = p - q;
      if (d == 0.0) return cplx(b / std::numbers::pi, 0.0);
      return cplx(std::sin(b * d) / (std::numbers::pi * d), 0.0);
    };
  }
  if (k.name == "gaussian") {
    return [s = k.sigma](double p, double q) {
      const double d = p - q;
      return cplx(std::exp(-d * d / (2.0 * s * s)), 0.0);
    };
  }
  if (k.name == "exponential") {
    return [l = k.length](double p, double q) { return cplx(std::exp(-std::abs(p - q) / l), 0.0); };
  }
  if (k.name == "constant") return [](double, double) { return cplx(1.0, 0.0); };
  return [](double, double) { return cplx(-1.0, 0.0); };
}

Problem build_problem_unchecked(const RunConfig& cfg) {
  Grid grid_e = build_grid(cfg.grid_e);
  std::optional<Grid> grid_t;
  if (cfg.grid_t) grid_t = build_grid(*cfg.grid_t);

  if (const auto* k = std::get_if<KernelSpec>(&cfg.source)) {
    KernelMatrix kernel = k->name == "delta" ? delta_kernel(grid_e)
                                             : assemble_kernel(builtin_kernel(*k, grid_e.lower()), grid_e);
    return Problem{grid_e, std::nullopt, std::move(kernel), std::nullopt, std::nullopt};
  }
  if (const auto* k = std::get_if<KernelCsvSpec>(&cfg.source)) {
    KernelMatrix kernel = KernelMatrix::from_gram(grid_e, csv::read_matrix(k->path));
    return Problem{grid_e, std::nullopt, std::move(kernel), std::nullopt, std::nullopt};
  }
  std::optional<FeatureFamily> family;
  std::optional<FeatureMap> feature;
  if (const auto* f = std::get_if<FeatureFamily>(&cfg.source)) {
    family = *f;
    feature = make_feature_map(*f, *grid_t, grid_e);
  } else {
    const auto& spec = std::get<FeatureCsvSpec>(cfg.source);
    feature = FeatureMap(*grid_t, grid_e, csv::read_matrix(spec.path));
  }
  TransformOperator op = build_transform(std::move(*feature));
  KernelMatrix kernel = op.induced();
  return Problem{grid_e, grid_t, std::move(kernel), std::move(op), family};
}

ojson grid_summary(const Grid& g) {
  ojson out;
  out["lower"] = g.lower();
  out["upper"] = g.upper();
  out["n"] = g.size();
  out["rule"] = std::string(to_string(g.rule()));
  out["total_weight"] = g.total_weight();
  return out;
}

/// Accumulates judged criteria in a fixed order.
class Criteria {
 public:
  bool check(const std::string& name, double value, double tolerance, const std::string& comparison,
             const std::string& note = {}) {
    bool pass = false;
    if (comparison == "<=") pass = value <= tolerance;
    else if (comparison == ">=") pass = value >= tolerance;
    else pass = value == tolerance;
    ojson c;
    c["name"] = name;
    c["value"] = value;
    c["tolerance"] = tolerance;
    c["comparison"] = comparison;
    c["status"] = pass ? "pass" : "fail";
    c["pass"] = pass;
    if (!note.empty()) c["note"] = note;
    list_.push_back(std::move(c));
    all_pass_ = all_pass_ && pass;
    return pass;
  }

  void skip(const std::string& name, const std::string& reason) {
    ojson c;
    c["name"] = name;
    c["status"] = "skipped";
    c["reason"] = reason;
    list_.push_back(std::move(c));
  }

  void error(const std::string& name, const std::string& message) {
    ojson c;
    c["name"] = name;
    c["status"] = "error";
    c["pass"] = false;
    c["reason"] = message;
    list_.push_back(std::move(c));
    all_pass_ = false;
  }

  bool all_pass() const noexcept { return all_pass_; }
  const ojson& list() const noexcept { return list_; }

 private:
  ojson list_ = ojson::array();
  bool all_pass_ = true;
};

/// Runs a group of checks. Library errors become failed criteria instead
/// of aborting the run.
void guarded(Criteria& criteria, const std::string& name, const std::function<void()>& body) {
  try {
    body();
  } catch (const Error& e) {
    criteria.error(name, e.what());
  }
}

struct PsdOutcome {
  bool pass = false;
  double scale = 0.0;
};

PsdOutcome psd_section(const KernelMatrix& kernel, const Tolerances& tol, ojson& report,
                       Criteria& criteria) {
  // The tolerance is relative to the largest eigenvalue magnitude.
  const PsdReport raw = validate_psd(kernel, 0.0);
  const double scale = std::max(std::abs(raw.min_eigenvalue), std::abs(raw.max_eigenvalue));
  const double rel_min = scale > 0.0 ? raw.min_eigenvalue / scale : 0.0;
  ojson psd;
  psd["min_eigenvalue"] = raw.min_eigenvalue;
  psd["max_eigenvalue"] = raw.max_eigenvalue;
  psd["relative_min_eigenvalue"] = rel_min;
  psd["tol_psd"] = tol.tol_psd;
  const bool pass = criteria.check("psd", rel_min, -tol.tol_psd, ">=");
  psd["pass"] = pass;
  report["psd"] = psd;
  return {pass, scale};
}

ojson spectral_summary(const RkhsSpace& space) {
  const SpectralData& s = space.spectral();
  ojson out;
  out["cutoff_rel"] = s.cutoff_rel();
  out["cutoff"] = s.cutoff();
  out["numerical_rank"] = s.numerical_rank();
  out["max_eigenvalue"] = s.max_eigenvalue();
  out["min_retained_eigenvalue"] =
      s.numerical_rank() > 0 ? s.eigenvalues()[s.numerical_rank() - 1] : 0.0;
  out["condition_number"] = s.condition_number();
  out["reconstruction_error"] = space.reconstruction_error();
  return out;
}

ojson verdict_json(const WeightedL2Verdict& v) {
  ojson out;
  out["is_weighted_l2"] = v.is_weighted_l2;
  out["offdiag_ratio"] = v.offdiag_ratio;
  out["tol_diag"] = v.tol_diag;
  out["min_diagonal"] = v.min_diagonal;
  out["max_diagonal"] = v.max_diagonal;
  if (v.weight_w) {
    std::vector<double> w(static_cast<std::size_t>(v.weight_w->size()));
    for (Eigen::Index i = 0; i < v.weight_w->size(); ++i) w[static_cast<std::size_t>(i)] = v.weight_w->values()[i].real();
    out["weight_w"] = w;
  } else {
    out["weight_w"] = nullptr;
  }
  return out;
}

void rkhs_checks(const RunConfig& cfg, const RkhsSpace& space, ojson& report, Criteria& criteria) {
  const KernelMatrix& k = space.kernel();
  const Grid& grid = space.grid();
  const Eigen::Index n = k.size();
  const bool real = k.is_real();
  const double cond = space.spectral().condition_number();
  const bool conditioned = cond <= kConditionBound;
  ojson rk;

  // Random range-valid functions f = K g. Sections are included as well.
  SeededRng rng(cfg.seed);
  std::vector<DiscreteFunction> samples;
  samples.reserve(cfg.trials);
  for (std::size_t t = 0; t < cfg.trials; ++t) {
    samples.push_back(apply_operator(k, DiscreteFunction(grid, rng.gaussian_vector(n, real))));
  }

  guarded(criteria, "reproducing", [&] {
    double worst_random = 0.0;
    double worst_section = 0.0;
    for (const auto& f : samples) worst_random = std::max(worst_random, max_reproducing_residual(space, f));
    for (Eigen::Index q = 0; q < n; ++q) {
      worst_section = std::max(worst_section, max_reproducing_residual(space, k.section(q)));
    }
    const double tol = conditioned ? kReproducingTol : kReproducingTolIllConditioned;
    ojson r;
    r["max_residual"] = std::max(worst_random, worst_section);
    r["max_residual_random"] = worst_random;
    r["max_residual_sections"] = worst_section;
    r["random_functions"] = cfg.trials;
    r["tolerance"] = tol;
    r["condition_number"] = cond;
    r["relaxed_for_conditioning"] = !conditioned;
    rk["reproducing"] = r;
    criteria.check("reproducing", std::max(worst_random, worst_section), tol, "<=",
                   conditioned ? "" : "condition number above 1e8, tolerance relaxed");
  });

  guarded(criteria, "hermitian_symmetry", [&] {
    double sym = 0.0;
    double min_self = std::numeric_limits<double>::infinity();
    for (std::size_t t = 0; t < samples.size(); ++t) {
      const CVector& f = samples[t].values();
      const CVector& g = samples[(t + 1) % samples.size()].values();
      const double nf = space.norm_unchecked(f);
      const double ng = space.norm_unchecked(g);
      const cplx fg = space.inner_unchecked(f, g);
      const cplx gf = space.inner_unchecked(g, f);
      const cplx ff = space.inner_unchecked(f, f);
      if (nf > 0.0 && ng > 0.0) sym = std::max(sym, std::abs(fg - std::conj(gf)) / (nf * ng));
      if (nf > 0.0) {
        sym = std::max(sym, std::abs(ff.imag()) / (nf * nf));
        min_self = std::min(min_self, ff.real() / (nf * nf));
      }
    }
    if (!std::isfinite(min_self)) min_self = 0.0;
    ojson r;
    r["max_symmetry_defect"] = sym;
    r["min_relative_self_inner"] = min_self;
    rk["inner_product"] = r;
    criteria.check("hermitian_symmetry", sym, kSymmetryTol, "<=");
    criteria.check("positivity", min_self, 0.0, ">=");
  });

  guarded(criteria, "point_evaluation", [&] {
    SeededRng prng(cfg.seed ^ 0x9e3779b97f4a7c15ULL);
    std::size_t violations = 0;
    double max_ratio = 0.0;
    for (std::size_t t = 0; t < cfg.point_eval_trials; ++t) {
      const DiscreteFunction f = apply_operator(k, DiscreteFunction(grid, prng.gaussian_vector(n, real)));
      const auto q = static_cast<Eigen::Index>(prng.index(static_cast<std::uint64_t>(n)));
      const PointEvalBound b = point_eval_bound(space, f, q);
      if (!b.holds) ++violations;
      if (b.rhs > 0.0) max_ratio = std::max(max_ratio, b.lhs / b.rhs);
    }
    double equality = 0.0;
    for (Eigen::Index q = 0; q < n; ++q) {
      const PointEvalBound b = point_eval_bound(space, k.section(q), q);
      if (b.rhs > 0.0) equality = std::max(equality, std::abs(b.lhs - b.rhs) / b.rhs);
    }
    ojson r;
    r["trials"] = cfg.point_eval_trials;
    r["violations"] = violations;
    r["max_ratio"] = max_ratio;
    r["section_equality_residual"] = equality;
    rk["point_evaluation"] = r;
    criteria.check("point_evaluation_bound", static_cast<double>(violations), 0.0, "==");
    criteria.check("point_evaluation_equality", equality, kEqualityTol, "<=");
  });

  guarded(criteria, "section_norms", [&] {
    const RVector s = space.section_norms_squared();
    double scale = 0.0;
    for (Eigen::Index q = 0; q < n; ++q) scale = std::max(scale, std::abs(k(q, q).real()));
    double worst = 0.0;
    for (Eigen::Index q = 0; q < n; ++q) worst = std::max(worst, std::abs(s[q] - k(q, q).real()));
    if (scale > 0.0) worst /= scale;
    ojson r;
    r["max_residual"] = worst;
    rk["section_norms"] = r;
    criteria.check("section_norms", worst, kSectionNormTol, "<=");
  });

  report["rkhs"] = rk;
}

void transform_checks(const RunConfig& cfg, const Problem& pb, ojson& report, Criteria& criteria) {
  const TransformOperator& op = *pb.op;
  const Tolerances& tol = cfg.tolerances;
  ojson tr;
  tr["rows"] = op.grid_t().size();
  tr["cols"] = op.grid_e().size();
  tr["is_real"] = op.is_real();

  guarded(criteria, "identities", [&] {
    const IdentityReport rep = verify_identities(op, tol.cutoff_rel, cfg.trials, cfg.seed);
    const InjectivityReport& inj = rep.injectivity;
    ojson ij;
    ij["injective"] = inj.injective;
    ij["numerical_rank"] = inj.numerical_rank;
    ij["deficiency"] = inj.deficiency;
    ij["tol_rank"] = inj.tol_rank;
    ij["max_singular_value"] = inj.max_singular_value;
    ij["min_singular_value"] = inj.min_singular_value;
    tr["injectivity"] = ij;

    ojson id;
    id["factorization_residual"] = rep.factorization_residual;
    id["identity_residual"] = rep.identity_residual;
    id["isometry_defect"] = rep.isometry_defect;
    id["norm_defect"] = rep.norm_defect;
    id["numerical_rank"] = rep.numerical_rank;
    id["condition_number"] = rep.condition_number;
    id["trials"] = rep.trials;
    id["flags"] = rep.flags;
    tr["identities"] = id;

    criteria.check("factorization", rep.factorization_residual, kFactorizationTol, "<=");
    const bool well = inj.injective && rep.condition_number <= kConditionBound;
    const std::string reason = !inj.injective ? "transform is not injective"
                                              : "condition number above 1e8";
    if (well) {
      criteria.check("isometry", rep.isometry_defect, kIdentityTol, "<=");
      criteria.check("identity", rep.identity_residual, kIdentityTol, "<=");
      criteria.check("norm_preservation", rep.norm_defect, kIdentityTol, "<=");
    } else {
      criteria.skip("isometry", reason);
      criteria.skip("identity", reason);
      criteria.skip("norm_preservation", reason);
    }

    if (well) {
      guarded(criteria, "rkhs_adjoint_inversion", [&] {
        const UnitaryInversionReport u =
            check_unitary_inversion(op, tol.cutoff_rel, cfg.trials, cfg.seed, tol.tol_diag);
        ojson ui;
        ui["l2_adjoint_error"] = u.l2_adjoint_error;
        ui["rkhs_adjoint_error"] = u.rkhs_adjoint_error;
        ui["kernel_is_weighted_l2"] = u.verdict_from_kernel.is_weighted_l2;
        ui["l2_adjoint_inverts"] = u.l2_adjoint_error <= kL2InversionTol;
        ui["equivalence_consistent"] =
            u.verdict_from_kernel.is_weighted_l2 == (u.l2_adjoint_error <= kL2InversionTol);
        ui["trials"] = u.trials;
        report["unitary_inversion"] = ui;
        criteria.check("rkhs_adjoint_inversion", u.rkhs_adjoint_error, kRkhsInversionTol, "<=");
      });
    } else {
      criteria.skip("rkhs_adjoint_inversion", reason);
    }
  });

  if (pb.family && pb.family->kind != FeatureFamilyKind::orthonormal_diagonal) {
    bool covered = true;
    if (pb.family->kind == FeatureFamilyKind::gaussian) {
      const auto [lo, hi] = gaussian_truncation_interval(pb.family->sigma, op.grid_e());
      covered = op.grid_t().lower() <= lo && op.grid_t().upper() >= hi;
    }
    if (covered) {
      tr["closed_form_error"] = closed_form_error(*pb.family, op);
    } else {
      tr["closed_form_error"] = nullptr;
    }
  }
  report["transform"] = tr;
}

ojson base_report(const RunConfig& cfg, const char* command) {
  ojson r;
  r["schema_version"] = kSchemaVersion;
  r["command"] = command;
  r["config"] = echo_config(cfg);
  r["seed"] = cfg.seed;
  return r;
}

void describe_problem(const RunConfig& cfg, const Problem& pb, ojson& report) {
  ojson grids;
  grids["E"] = grid_summary(pb.grid_e);
  if (pb.grid_t) grids["T"] = grid_summary(*pb.grid_t);
  report["grids"] = grids;
  ojson k;
  k["source"] = std::string(source_kind(cfg.source));
  k["size"] = pb.kernel.size();
  k["is_real"] = pb.kernel.is_real();
  k["hermitian_defect"] = pb.kernel.hermitian_defect();
  report["kernel"] = k;
  if (cfg.output.kernel_csv) {
    try {
      csv::write_kernel(*cfg.output.kernel_csv, pb.kernel);
    } catch (const Error& e) {
      throw ConfigError(e.what());
    }
  }
}

void finish(RunResult& result, Criteria& criteria, ojson timings) {
  result.report["criteria"] = criteria.list();
  result.report["passed"] = criteria.all_pass();
  result.report["timings"] = std::move(timings);
  result.exit_code = criteria.all_pass() ? kExitOk : kExitCheckFailed;
}

}  // namespace

Problem build_problem(const RunConfig& config) {
  try {
    return build_problem_unchecked(config);
  } catch (const Error& e) {
    throw ConfigError(e.what());
  }
}

RunResult run_verify(const RunConfig& cfg) {
  const auto start = Clock::now();
  RunResult result;
  result.report = base_report(cfg, "verify");
  const Problem pb = build_problem(cfg);
  describe_problem(cfg, pb, result.report);
  const double build_ms = elapsed_ms(start);

  Criteria criteria;
  const auto checks_start = Clock::now();
  const PsdOutcome psd = psd_section(pb.kernel, cfg.tolerances, result.report, criteria);
  const std::string no_rkhs = !psd.pass ? "kernel is not positive semidefinite" : "kernel is zero";
  if (psd.pass && psd.scale > 0.0) {
    guarded(criteria, "spectral", [&] {
      const RkhsSpace space(pb.kernel, cfg.tolerances.cutoff_rel, cfg.tolerances.range_tol);
      result.report["spectral"] = spectral_summary(space);
      rkhs_checks(cfg, space, result.report, criteria);
    });
  } else {
    for (const char* name : {"reproducing", "hermitian_symmetry", "positivity", "point_evaluation_bound",
                             "point_evaluation_equality", "section_norms"}) {
      criteria.skip(name, no_rkhs);
    }
  }
  if (pb.op) {
    if (psd.pass) {
      transform_checks(cfg, pb, result.report, criteria);
    } else {
      criteria.skip("factorization", no_rkhs);
    }
  }
  result.report["weighted_l2"] = verdict_json(check_weighted_l2(pb.kernel, cfg.tolerances.tol_diag));

  ojson timings;
  timings["build_ms"] = build_ms;
  timings["checks_ms"] = elapsed_ms(checks_start);
  timings["total_ms"] = elapsed_ms(start);
  finish(result, criteria, std::move(timings));
  return result;
}

RunResult run_analyze(const RunConfig& cfg) {
  const auto start = Clock::now();
  RunResult result;
  result.report = base_report(cfg, "analyze");
  const Problem pb = build_problem(cfg);
  describe_problem(cfg, pb, result.report);
  Criteria criteria;
  psd_section(pb.kernel, cfg.tolerances, result.report, criteria);
  result.report["weighted_l2"] = verdict_json(check_weighted_l2(pb.kernel, cfg.tolerances.tol_diag));
  ojson timings;
  timings["total_ms"] = elapsed_ms(start);
  finish(result, criteria, std::move(timings));
  return result;
}

InvertResult run_invert(const RunConfig& cfg, const std::filesystem::path& data_csv) {
  if (!cfg.has_feature_source()) {
    throw ConfigError("invert requires a feature source ('feature' or 'feature_csv')");
  }
  const Problem pb = build_problem(cfg);
  DiscreteFunction data = [&] {
    try {
      return csv::read_function(data_csv, pb.grid_e);
    } catch (const Error& e) {
      throw ConfigError(std::string("data file '") + data_csv.string() + "': " + e.what());
    }
  }();

  InvertResult out;
  ojson& s = out.summary;
  s["schema_version"] = kSchemaVersion;
  s["command"] = "invert";
  s["config"] = echo_config(cfg);
  s["data"] = data_csv.string();
  s["range_tol"] = cfg.tolerances.range_tol;

  const TransformInverter inverter(*pb.op, cfg.tolerances.cutoff_rel, cfg.tolerances.range_tol);
  const InjectivityReport& inj = inverter.injectivity();
  s["injective"] = inj.injective;
  s["numerical_rank"] = inj.numerical_rank;
  s["deficiency"] = inj.deficiency;
  try {
    InversionResult r = inverter.invert(data);
    s["range_residual"] = r.range_residual;
    s["status"] = "ok";
    out.recovered = std::move(r.F);
    out.grid_t = *pb.grid_t;
    out.exit_code = kExitOk;
  } catch (const RangeViolation& e) {
    s["range_residual"] = e.residual();
    s["status"] = "range_violation";
    s["message"] = e.what();
    out.exit_code = kExitRange;
  } catch (const Error& e) {
    if (e.code() != ErrorCode::not_injective) throw;
    s["range_residual"] = nullptr;
    s["status"] = "not_injective";
    s["message"] = e.what();
    out.exit_code = kExitRange;
  }
  return out;
}

nlohmann::ordered_json without_timings(nlohmann::ordered_json report) {
  report.erase("timings");
  return report;
}

std::string dump_report(const nlohmann::ordered_json& report) { return report.dump(2) + "\n"; }

void write_report(const std::filesystem::path& path, const nlohmann::ordered_json& report) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write report '" + path.string() + "'");
  out << dump_report(report);
  if (!out) throw ConfigError("failed writing report '" + path.string() + "'");
}

}  // namespace rkhslab::cli
