#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "rkhslab/rkhs.hpp"

namespace rkhslab {

/// Samples h(t_k, p_i) of a feature function: rows follow grid_T (the
/// parameter domain carrying the measure m), columns follow grid_E.
class FeatureMap {
 public:
  FeatureMap(Grid grid_t, Grid grid_e, CMatrix values);

  const Grid& grid_t() const noexcept { return grid_t_; }
  const Grid& grid_e() const noexcept { return grid_e_; }
  const CMatrix& values() const noexcept { return values_; }
  Eigen::Index rows() const noexcept { return values_.rows(); }
  Eigen::Index cols() const noexcept { return values_.cols(); }
  /// True when every entry is real; conjugation is then a no-op and trial
  /// vectors are drawn real.
  bool is_real() const noexcept;

  FeatureMap scaled(double factor) const;

 private:
  Grid grid_t_;
  Grid grid_e_;
  CMatrix values_;
};

/// The transform (L F)(p) = int conj(h(t, p)) F(t) dm(t) and its
/// L2-adjoint (L* g)(t) = int h(t, p) g(p) dp, discretized as
///
///   forward = H^H diag(m)       (N x M)
///   adjoint = H diag(w)         (M x N)
///   induced = H^H diag(m) H     (N x N kernel matrix)
///
/// so that the induced kernel operator induced * diag(w) factors as
/// forward * adjoint.
class TransformOperator {
 public:
  explicit TransformOperator(FeatureMap feature);

  const FeatureMap& feature() const noexcept { return feature_; }
  const Grid& grid_t() const noexcept { return feature_.grid_t(); }
  const Grid& grid_e() const noexcept { return feature_.grid_e(); }
  const CMatrix& forward_matrix() const noexcept { return forward_; }
  const CMatrix& adjoint_matrix() const noexcept { return adjoint_; }
  const KernelMatrix& induced() const noexcept { return induced_; }
  bool is_real() const noexcept { return feature_.is_real(); }

 private:
  FeatureMap feature_;
  CMatrix forward_;
  CMatrix adjoint_;
  KernelMatrix induced_;
};

TransformOperator build_transform(FeatureMap feature);

/// f = L F, from grid_T to grid_E.
DiscreteFunction apply_forward(const TransformOperator& op,
                               const DiscreteFunction& F);
/// L* g with respect to the two weighted L2 products, grid_E to grid_T.
DiscreteFunction apply_adjoint(const TransformOperator& op,
                               const DiscreteFunction& g);
/// L* K^-1 g: the adjoint of L viewed as a map into H_K. `space` must be
/// the RKHS of op.induced(). No range check is made.
DiscreteFunction apply_rkhs_adjoint(const TransformOperator& op,
                                    const RkhsSpace& space,
                                    const DiscreteFunction& g);

struct InjectivityReport {
  bool injective = false;
  Eigen::Index numerical_rank = 0;
  Eigen::Index deficiency = 0;
  double tol_rank = 0.0;
  double max_singular_value = 0.0;
  double min_singular_value = 0.0;
};

/// Default relative singular-value threshold. It matches the default
/// eigenvalue cutoff of the induced kernel, whose eigenvalues are the
/// squared singular values.
inline constexpr double kDefaultRankTol = 1e-6;

/// Rank of diag(m)^(1/2) H diag(w)^(1/2) at a relative singular-value
/// threshold. L is injective iff the rank equals the number of T nodes.
InjectivityReport check_injectivity(const TransformOperator& op,
                                    double tol_rank = kDefaultRankTol);

/// Residuals of the transform identities over seeded random trials.
struct IdentityReport {
  /// ||K W - L L*||_F / ||K W||_F.
  double factorization_residual = 0.0;
  /// max ||L* K^-1 L F - F|| / ||F||.
  double identity_residual = 0.0;
  /// max |[L F, L G] - (F, G)_0| / (||F|| ||G||).
  double isometry_defect = 0.0;
  /// max | ||L F||_{H_K} - ||F||_0 | / ||F||_0.
  double norm_defect = 0.0;
  InjectivityReport injectivity;
  Eigen::Index numerical_rank = 0;
  double condition_number = 0.0;
  double cutoff_rel = 0.0;
  std::size_t trials = 0;
  std::uint64_t seed = 0;
  std::vector<std::string> flags;
};

IdentityReport verify_identities(const TransformOperator& op, double cutoff_rel,
                                 std::size_t trials, std::uint64_t seed);

struct InversionResult {
  DiscreteFunction F;
  /// ||L F - f|| / ||f|| on grid_E; 0 when f == 0.
  double range_residual = 0.0;
};

/// Recovers F from f = L F as L* K^-1 f, with the induced kernel and its
/// spectral factorization prepared once.
class TransformInverter {
 public:
  TransformInverter(const TransformOperator& op,
                    double cutoff_rel = kDefaultCutoffRel,
                    double range_tol = kDefaultRangeTol);

  const InjectivityReport& injectivity() const noexcept { return injectivity_; }
  const RkhsSpace& space() const noexcept { return space_; }

  /// Throws not_injective or RangeViolation.
  InversionResult invert(const DiscreteFunction& f) const;
  /// As invert() without the range verdict.
  InversionResult invert_unchecked(const DiscreteFunction& f) const;

 private:
  TransformOperator op_;
  RkhsSpace space_;
  InjectivityReport injectivity_;
  double range_tol_;
};

InversionResult invert(const TransformOperator& op, const DiscreteFunction& f,
                       double cutoff_rel = kDefaultCutoffRel,
                       double range_tol = kDefaultRangeTol);

}  // namespace rkhslab
