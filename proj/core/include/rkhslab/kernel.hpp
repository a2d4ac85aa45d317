#pragma once

#include <functional>

#include "rkhslab/grid.hpp"

namespace rkhslab {

inline constexpr double kDefaultCutoffRel = 1e-12;
inline constexpr double kDefaultRangeTol = 1e-6;
/// Relative Hermitian defect above which a kernel is rejected.
inline constexpr double kHermitianDefectTol = 1e-6;

using KernelFunction = std::function<cplx(double p, double q)>;

/// Kernel values K(p_i, p_j) on a grid, stored exactly Hermitian.
///
/// Construction symmetrizes the raw values as (G + G^H) / 2 and records
/// the largest entry of |G - G^H| seen beforehand. Kernels whose defect
/// exceeds kHermitianDefectTol * max|G| are rejected as non-self-adjoint.
/// The integral operator is G * W with W the diagonal of quadrature
/// weights; its symmetric similarity transform is W^(1/2) G W^(1/2).
class KernelMatrix {
 public:
  static KernelMatrix assemble(const KernelFunction& kfun, const Grid& grid);
  static KernelMatrix from_gram(const Grid& grid, CMatrix gram);

  const Grid& grid() const noexcept { return grid_; }
  const CMatrix& gram() const noexcept { return gram_; }
  double hermitian_defect() const noexcept { return hermitian_defect_; }
  Eigen::Index size() const noexcept { return gram_.rows(); }
  cplx operator()(Eigen::Index i, Eigen::Index j) const { return gram_(i, j); }
  bool is_real() const noexcept;

  /// W^(1/2) G W^(1/2).
  CMatrix weighted_form() const;
  /// G W, the discretized integral operator.
  CMatrix operator_matrix() const;
  /// The kernel section K(., p_q) as a function on the grid.
  DiscreteFunction section(Eigen::Index q) const;

  /// Copy with every entry scaled by a real factor.
  KernelMatrix scaled(double factor) const;

 private:
  KernelMatrix(Grid grid, CMatrix gram, double defect);

  Grid grid_;
  CMatrix gram_;
  double hermitian_defect_;
};

KernelMatrix assemble_kernel(const KernelFunction& kfun, const Grid& grid);

/// Discrete v(p) delta(p - q): gram = diag(v_i / w_i), so the operator
/// G W is diag(v). With v omitted, v == 1 and the operator is the identity.
KernelMatrix delta_kernel(const Grid& grid);
KernelMatrix delta_kernel(const Grid& grid, const RVector& v);

struct PsdReport {
  bool pass = false;
  double min_eigenvalue = 0.0;
  double max_eigenvalue = 0.0;
  double tol_psd = 0.0;
};

/// Nonnegativity of the weighted form, judged against an absolute
/// tolerance: pass iff min eigenvalue >= -tol_psd.
PsdReport validate_psd(const KernelMatrix& kernel, double tol_psd);

/// (K f)(p_i) = sum_j K(p_i, p_j) w_j f_j.
DiscreteFunction apply_operator(const KernelMatrix& kernel,
                                const DiscreteFunction& f);

/// Eigen-decomposition of the weighted form W^(1/2) G W^(1/2).
///
/// Eigenvalues are sorted descending with the eigenvectors permuted to
/// match. Only eigenvalues strictly above cutoff_rel * lambda_max take part
/// in inverse solves; their count is the numerical rank.
class SpectralData {
 public:
  static SpectralData compute(const KernelMatrix& kernel, double cutoff_rel);

  const RVector& eigenvalues() const noexcept { return eigenvalues_; }
  const CMatrix& eigenvectors() const noexcept { return eigenvectors_; }
  double cutoff_rel() const noexcept { return cutoff_rel_; }
  double cutoff() const noexcept { return cutoff_; }
  Eigen::Index numerical_rank() const noexcept { return rank_; }
  double max_eigenvalue() const noexcept;
  double min_eigenvalue() const noexcept;
  /// lambda_max over the smallest retained eigenvalue; 0 for rank 0.
  double condition_number() const noexcept;

  /// Relative Frobenius error of U diag(lambda) U^H against the weighted form.
  double reconstruction_error(const KernelMatrix& kernel) const;
  /// max |U^H U - I|.
  double orthonormality_defect() const;

 private:
  RVector eigenvalues_;
  CMatrix eigenvectors_;
  double cutoff_rel_ = 0.0;
  double cutoff_ = 0.0;
  Eigen::Index rank_ = 0;
};

struct KernelSolve {
  DiscreteFunction solution;
  /// ||K x - f|| / ||f|| in the grid's L2 norm; 0 when f == 0.
  double range_residual;
};

/// Spectral pseudo-inverse of the kernel operator, factorized once.
class KernelSolver {
 public:
  KernelSolver(KernelMatrix kernel, double cutoff_rel = kDefaultCutoffRel);

  const KernelMatrix& kernel() const noexcept { return kernel_; }
  const SpectralData& spectral() const noexcept { return spectral_; }
  const Grid& grid() const noexcept { return kernel_.grid(); }

  /// Minimal-norm least-squares solution of K x = f over the numerical
  /// range. Throws RangeViolation when the range residual exceeds range_tol.
  KernelSolve solve(const DiscreteFunction& f,
                    double range_tol = kDefaultRangeTol) const;
  /// As solve(), reporting the residual without judging it.
  KernelSolve solve_unchecked(const DiscreteFunction& f) const;

  /// U_r^H W^(1/2) f: coordinates of f in the retained eigenbasis.
  CVector range_coordinates(const CVector& f) const;
  /// Relative residual of f against its projection onto the numerical range.
  double range_residual(const CVector& f) const;

 private:
  KernelMatrix kernel_;
  SpectralData spectral_;
  RVector sqrt_w_;
};

KernelSolve solve_kernel_system(const KernelMatrix& kernel,
                                const DiscreteFunction& f,
                                double cutoff_rel = kDefaultCutoffRel,
                                double range_tol = kDefaultRangeTol);

}  // namespace rkhslab
