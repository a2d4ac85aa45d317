#pragma once

#include <span>
#include <vector>

#include "rkhslab/kernel.hpp"

namespace rkhslab {

/// The reproducing kernel Hilbert space of a kernel matrix, realized on
/// the kernel's grid with inner product [f, g] = (K^-1 f, g)_{L2}.
///
/// K^-1 is the spectral pseudo-inverse held by a KernelSolver, so the
/// space is the numerical range of K; the null space is quotiented out.
/// Both arguments of the inner product must lie in that range up to
/// range_tol.
class RkhsSpace {
 public:
  explicit RkhsSpace(KernelMatrix kernel,
                     double cutoff_rel = kDefaultCutoffRel,
                     double range_tol = kDefaultRangeTol);

  const KernelSolver& solver() const noexcept { return solver_; }
  const KernelMatrix& kernel() const noexcept { return solver_.kernel(); }
  const SpectralData& spectral() const noexcept { return solver_.spectral(); }
  const Grid& grid() const noexcept { return solver_.grid(); }
  double cutoff_rel() const noexcept { return spectral().cutoff_rel(); }
  double range_tol() const noexcept { return range_tol_; }

  double reconstruction_error() const;

  /// Relative distance of f from the numerical range of K.
  double range_residual(const DiscreteFunction& f) const;
  /// Throws RangeViolation unless f is range-valid.
  void require_in_range(const DiscreteFunction& f, std::string_view what) const;

  /// Inner product of two sample vectors without range checks.
  cplx inner_unchecked(const CVector& f, const CVector& g) const;
  double norm_unchecked(const CVector& f) const;

  /// [f, K(., p_q)] for every grid index q at once, without range checks.
  CVector pair_with_sections(const CVector& f) const;
  /// [K(., p_q), K(., p_q)] for every q.
  RVector section_norms_squared() const;

 private:
  KernelSolver solver_;
  double range_tol_;
  // Columns are range coordinates of the kernel sections, divided by the
  // retained eigenvalues.
  CMatrix scaled_section_coords_;
};

/// [f, g]; throws RangeViolation when either argument is out of range.
cplx rkhs_inner(const RkhsSpace& space, const DiscreteFunction& f,
                const DiscreteFunction& g);

/// ||f||_{H_K}.
double rkhs_norm(const RkhsSpace& space, const DiscreteFunction& f);

/// |[f, K(., p_q)] - f(p_q)| / (1 + |f(p_q)|).
double check_reproducing(const RkhsSpace& space, const DiscreteFunction& f,
                         Eigen::Index q_index);

/// check_reproducing maximized over every grid index.
double max_reproducing_residual(const RkhsSpace& space, const DiscreteFunction& f);

struct PointEvalBound {
  double lhs = 0.0;
  double rhs = 0.0;
  bool holds = false;
};

/// |f(p_q)| against ||f||_{H_K} * sqrt(K(p_q, p_q)).
PointEvalBound point_eval_bound(const RkhsSpace& space,
                                const DiscreteFunction& f,
                                Eigen::Index q_index);

struct SectionProjection {
  CVector coefficients;
  double residual_norm = 0.0;
  /// Set when the submatrix of kernel values was numerically singular and
  /// a reduced-rank solve was used.
  bool reduced_rank = false;
  Eigen::Index rank = 0;
};

/// Best H_K approximation of f by sum_j X_j K(., p_{i_j}). The normal
/// equations reduce to G_sub X = f(p_sub) by the reproducing property.
SectionProjection project_onto_sections(const RkhsSpace& space,
                                        std::span<const Eigen::Index> indices,
                                        const DiscreteFunction& f);

/// The discrete delta at p_q: values delta_iq / w_q, so that
/// (f, delta_q)_{L2} == f(p_q).
DiscreteFunction discrete_delta(const Grid& grid, Eigen::Index q_index);

}  // namespace rkhslab
