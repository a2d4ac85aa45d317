#include "rkhslab/transform.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <Eigen/SVD>

#include "rkhslab/error.hpp"
#include "rkhslab/random.hpp"

namespace rkhslab {

FeatureMap::FeatureMap(Grid grid_t, Grid grid_e, CMatrix values)
    : grid_t_(std::move(grid_t)),
      grid_e_(std::move(grid_e)),
      values_(std::move(values)) {
  if (values_.rows() != grid_t_.size() || values_.cols() != grid_e_.size()) {
    std::ostringstream os;
    os << "feature matrix is " << values_.rows() << "x" << values_.cols()
       << " but the grids call for " << grid_t_.size() << "x" << grid_e_.size();
    throw Error(ErrorCode::grid_mismatch, os.str());
  }
  if (!values_.allFinite()) {
    throw Error(ErrorCode::non_finite, "feature map has non-finite entries");
  }
}

bool FeatureMap::is_real() const noexcept {
  return (values_.imag().array() == 0.0).all();
}

FeatureMap FeatureMap::scaled(double factor) const {
  return FeatureMap(grid_t_, grid_e_, factor * values_);
}

namespace {

KernelMatrix induced_kernel(const FeatureMap& feature, const CMatrix& forward) {
  return KernelMatrix::from_gram(feature.grid_e(), forward * feature.values());
}

}  // namespace

TransformOperator::TransformOperator(FeatureMap feature)
    : feature_(std::move(feature)),
      forward_(feature_.values().adjoint() *
               feature_.grid_t().weights().asDiagonal()),
      adjoint_(feature_.values() * feature_.grid_e().weights().asDiagonal()),
      induced_(induced_kernel(feature_, forward_)) {}

TransformOperator build_transform(FeatureMap feature) {
  return TransformOperator(std::move(feature));
}

DiscreteFunction apply_forward(const TransformOperator& op,
                               const DiscreteFunction& F) {
  require_aligned(F, op.grid_t(), "transform input");
  return DiscreteFunction(op.grid_e(), op.forward_matrix() * F.values());
}

DiscreteFunction apply_adjoint(const TransformOperator& op,
                               const DiscreteFunction& g) {
  require_aligned(g, op.grid_e(), "adjoint input");
  return DiscreteFunction(op.grid_t(), op.adjoint_matrix() * g.values());
}

DiscreteFunction apply_rkhs_adjoint(const TransformOperator& op,
                                    const RkhsSpace& space,
                                    const DiscreteFunction& g) {
  require_aligned(g, op.grid_e(), "adjoint input");
  const KernelSolve x = space.solver().solve_unchecked(g);
  return apply_adjoint(op, x.solution);
}

InjectivityReport check_injectivity(const TransformOperator& op,
                                    double tol_rank) {
  const FeatureMap& fm = op.feature();
  const CMatrix scaled = fm.grid_t().weights().cwiseSqrt().asDiagonal() *
                         fm.values() *
                         fm.grid_e().weights().cwiseSqrt().asDiagonal();
  Eigen::BDCSVD<CMatrix> svd(scaled);
  const RVector& sv = svd.singularValues();
  InjectivityReport r;
  r.tol_rank = tol_rank;
  r.max_singular_value = sv.size() > 0 ? sv[0] : 0.0;
  r.min_singular_value = sv.size() > 0 ? sv[sv.size() - 1] : 0.0;
  const double threshold = tol_rank * r.max_singular_value;
  for (Eigen::Index k = 0; k < sv.size(); ++k) {
    if (sv[k] > threshold) ++r.numerical_rank;
  }
  r.deficiency = fm.rows() - r.numerical_rank;
  r.injective = r.deficiency == 0;
  return r;
}

IdentityReport verify_identities(const TransformOperator& op, double cutoff_rel,
                                 std::size_t trials, std::uint64_t seed) {
  if (trials < 1) throw Error(ErrorCode::invalid_argument, "trials must be >= 1");
  IdentityReport rep;
  rep.cutoff_rel = cutoff_rel;
  rep.trials = trials;
  rep.seed = seed;

  const CMatrix kw = op.induced().operator_matrix();
  const CMatrix llstar = op.forward_matrix() * op.adjoint_matrix();
  const double kw_norm = kw.norm();
  rep.factorization_residual =
      kw_norm > 0.0 ? (kw - llstar).norm() / kw_norm : (kw - llstar).norm();

  rep.injectivity = check_injectivity(op, std::sqrt(cutoff_rel));
  if (!rep.injectivity.injective) rep.flags.emplace_back("not-injective");

  const RkhsSpace space(op.induced(), cutoff_rel);
  rep.numerical_rank = space.spectral().numerical_rank();
  rep.condition_number = space.spectral().condition_number();

  const RVector& m = op.grid_t().weights();
  const Eigen::Index M = op.grid_t().size();
  SeededRng rng(seed);
  for (std::size_t t = 0; t < trials; ++t) {
    const CVector F = rng.gaussian_vector(M, op.is_real());
    const CVector G = rng.gaussian_vector(M, op.is_real());
    const CVector f = op.forward_matrix() * F;
    const CVector g = op.forward_matrix() * G;
    const double nF = weighted_norm(F, m);
    const double nG = weighted_norm(G, m);

    const KernelSolve x = space.solver().solve_unchecked(
        DiscreteFunction(op.grid_e(), f));
    const CVector back = op.adjoint_matrix() * x.solution.values();
    rep.identity_residual =
        std::max(rep.identity_residual, weighted_norm(back - F, m) / nF);

    const cplx lhs = space.inner_unchecked(f, g);
    const cplx rhs = weighted_dot(F, G, m);
    rep.isometry_defect =
        std::max(rep.isometry_defect, std::abs(lhs - rhs) / (nF * nG));

    const double nf = space.norm_unchecked(f);
    rep.norm_defect = std::max(rep.norm_defect, std::abs(nf - nF) / nF);
  }
  return rep;
}

TransformInverter::TransformInverter(const TransformOperator& op,
                                     double cutoff_rel, double range_tol)
    : op_(op),
      space_(op.induced(), cutoff_rel, range_tol),
      injectivity_(check_injectivity(op, std::sqrt(cutoff_rel))),
      range_tol_(range_tol) {}

InversionResult TransformInverter::invert_unchecked(
    const DiscreteFunction& f) const {
  require_aligned(f, op_.grid_e(), "data");
  if (!injectivity_.injective) {
    std::ostringstream os;
    os << "transform is not injective: numerical rank "
       << injectivity_.numerical_rank << " < " << op_.grid_t().size()
       << " (deficiency " << injectivity_.deficiency << ")";
    throw Error(ErrorCode::not_injective, os.str());
  }
  DiscreteFunction F = apply_rkhs_adjoint(op_, space_, f);
  const RVector& w = op_.grid_e().weights();
  const double fn = weighted_norm(f.values(), w);
  const CVector refit = op_.forward_matrix() * F.values();
  const double res = fn > 0.0 ? weighted_norm(refit - f.values(), w) / fn : 0.0;
  return {std::move(F), res};
}

InversionResult TransformInverter::invert(const DiscreteFunction& f) const {
  InversionResult out = invert_unchecked(f);
  if (out.range_residual > range_tol_) {
    std::ostringstream os;
    os << "data lies outside the range of the transform: residual "
       << out.range_residual << " > " << range_tol_;
    throw RangeViolation(out.range_residual, range_tol_, os.str());
  }
  return out;
}

InversionResult invert(const TransformOperator& op, const DiscreteFunction& f,
                       double cutoff_rel, double range_tol) {
  return TransformInverter(op, cutoff_rel, range_tol).invert(f);
}

}  // namespace rkhslab
