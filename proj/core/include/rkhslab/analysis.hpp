#pragma once

#include <cstdint>
#include <optional>

#include "rkhslab/transform.hpp"

namespace rkhslab {

inline constexpr double kDefaultDiagTol = 1e-8;
/// Diagonal entries must reach this fraction of the largest one.
inline constexpr double kWeightFloorRel = 1e-12;

/// Whether the kernel operator is diagonal, K(p,q) = v(p) delta(p - q),
/// which makes H_K the weighted space L2(E, w dp) with w = 1/v.
struct WeightedL2Verdict {
  bool is_weighted_l2 = false;
  std::optional<DiscreteFunction> weight_w;
  std::optional<DiscreteFunction> weight_v;
  /// ||offdiag(K W)||_F / ||K W||_F, in [0, 1].
  double offdiag_ratio = 0.0;
  double min_diagonal = 0.0;
  double max_diagonal = 0.0;
  double tol_diag = 0.0;
};

WeightedL2Verdict check_weighted_l2(const KernelMatrix& kernel,
                                    double tol_diag = kDefaultDiagTol);

/// sum_i weights_i w_i f_i conj(g_i). Requires a positive verdict.
cplx weighted_l2_inner(const WeightedL2Verdict& verdict, const Grid& grid,
                       const DiscreteFunction& f, const DiscreteFunction& g);

struct UnitaryInversionReport {
  WeightedL2Verdict verdict_from_kernel;
  /// max ||L* L F - F|| / ||F|| using the plain L2-adjoint.
  double l2_adjoint_error = 0.0;
  /// max ||L* K^-1 L F - F|| / ||F|| using the RKHS adjoint.
  double rkhs_adjoint_error = 0.0;
  std::size_t trials = 0;
  std::uint64_t seed = 0;
};

/// Recovers seeded random F from f = L F through both adjoints. The plain
/// adjoint inverts L only when L is unitary onto H_K; the RKHS adjoint
/// inverts every injective L.
UnitaryInversionReport check_unitary_inversion(const TransformOperator& op,
                                               double cutoff_rel,
                                               std::size_t trials,
                                               std::uint64_t seed,
                                               double tol_diag = kDefaultDiagTol);

}  // namespace rkhslab
