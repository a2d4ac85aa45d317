#include "rkhslab/analysis.hpp"

#include <algorithm>
#include <cmath>

#include "rkhslab/error.hpp"
#include "rkhslab/random.hpp"

namespace rkhslab {

WeightedL2Verdict check_weighted_l2(const KernelMatrix& kernel,
                                    double tol_diag) {
  const CMatrix op = kernel.operator_matrix();
  const Eigen::Index n = op.rows();
  WeightedL2Verdict v;
  v.tol_diag = tol_diag;

  RVector diag(n);
  double off_sq = 0.0;
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index i = 0; i < n; ++i) {
      if (i != j) off_sq += std::norm(op(i, j));
    }
    diag[j] = op(j, j).real();
  }
  const double total_sq = op.squaredNorm();
  v.offdiag_ratio = total_sq > 0.0 ? std::min(std::sqrt(off_sq / total_sq), 1.0) : 0.0;
  v.min_diagonal = diag.minCoeff();
  v.max_diagonal = diag.maxCoeff();

  const double floor = kWeightFloorRel * v.max_diagonal;
  v.is_weighted_l2 = v.offdiag_ratio <= tol_diag && v.max_diagonal > 0.0 &&
                     v.min_diagonal >= floor;
  if (v.is_weighted_l2) {
    const RVector w = diag.cwiseInverse();
    v.weight_v.emplace(kernel.grid(), diag.cast<cplx>());
    v.weight_w.emplace(kernel.grid(), w.cast<cplx>());
  }
  return v;
}

cplx weighted_l2_inner(const WeightedL2Verdict& verdict, const Grid& grid,
                       const DiscreteFunction& f, const DiscreteFunction& g) {
  if (!verdict.is_weighted_l2 || !verdict.weight_w) {
    throw Error(ErrorCode::invalid_argument,
                "kernel is not of weighted-L2 type; no weight is available");
  }
  require_aligned(f, grid, "first argument");
  require_aligned(g, grid, "second argument");
  const RVector combined =
      grid.weights().cwiseProduct(verdict.weight_w->values().real());
  return weighted_dot(f.values(), g.values(), combined);
}

UnitaryInversionReport check_unitary_inversion(const TransformOperator& op,
                                               double cutoff_rel,
                                               std::size_t trials,
                                               std::uint64_t seed,
                                               double tol_diag) {
  if (trials < 1) throw Error(ErrorCode::invalid_argument, "trials must be >= 1");
  const InjectivityReport inj = check_injectivity(op, std::sqrt(cutoff_rel));
  if (!inj.injective) {
    throw Error(ErrorCode::not_injective,
                "unitary-inversion check needs an injective transform");
  }
  UnitaryInversionReport rep;
  rep.verdict_from_kernel = check_weighted_l2(op.induced(), tol_diag);
  rep.trials = trials;
  rep.seed = seed;

  const RkhsSpace space(op.induced(), cutoff_rel);
  const RVector& m = op.grid_t().weights();
  SeededRng rng(seed);
  for (std::size_t t = 0; t < trials; ++t) {
    const CVector F = rng.gaussian_vector(op.grid_t().size(), op.is_real());
    const double nF = weighted_norm(F, m);
    const DiscreteFunction f(op.grid_e(), op.forward_matrix() * F);

    const CVector plain = apply_adjoint(op, f).values();
    const CVector rkhs = apply_rkhs_adjoint(op, space, f).values();
    rep.l2_adjoint_error = std::max(rep.l2_adjoint_error, weighted_norm(plain - F, m) / nF);
    rep.rkhs_adjoint_error = std::max(rep.rkhs_adjoint_error, weighted_norm(rkhs - F, m) / nF);
  }
  return rep;
}

}  // namespace rkhslab
