#include "rkhslab/kernel.hpp"

#include <cmath>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "rkhslab/error.hpp"

namespace rkhslab {

namespace {

Eigen::SelfAdjointEigenSolver<CMatrix> decompose(const CMatrix& form,
                                                 bool vectors) {
  Eigen::SelfAdjointEigenSolver<CMatrix> es(
      form, vectors ? Eigen::ComputeEigenvectors : Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) {
    throw Error(ErrorCode::non_finite, "eigen-decomposition did not converge");
  }
  return es;
}

}  // namespace

KernelMatrix::KernelMatrix(Grid grid, CMatrix gram, double defect)
    : grid_(std::move(grid)), gram_(std::move(gram)), hermitian_defect_(defect) {}

KernelMatrix KernelMatrix::from_gram(const Grid& grid, CMatrix gram) {
  const Eigen::Index n = grid.size();
  if (gram.rows() != n || gram.cols() != n) {
    std::ostringstream os;
    os << "kernel matrix is " << gram.rows() << "x" << gram.cols()
       << " but the grid has " << n << " points";
    throw Error(ErrorCode::grid_mismatch, os.str());
  }
  if (!gram.allFinite()) {
    throw Error(ErrorCode::non_finite, "kernel value is not finite");
  }
  const CMatrix adj = gram.adjoint();
  const double defect = (gram - adj).cwiseAbs().maxCoeff();
  const double scale = gram.cwiseAbs().maxCoeff();
  if (defect > kHermitianDefectTol * scale) {
    std::ostringstream os;
    os << "kernel is not self-adjoint: Hermitian defect " << defect
       << " exceeds " << kHermitianDefectTol << " * max|K| = "
       << kHermitianDefectTol * scale;
    throw Error(ErrorCode::non_self_adjoint, os.str());
  }
  CMatrix sym = 0.5 * (gram + adj);
  // Averaging leaves round-off in the imaginary parts of the diagonal.
  for (Eigen::Index i = 0; i < n; ++i) sym(i, i) = cplx(sym(i, i).real(), 0.0);
  return KernelMatrix(grid, std::move(sym), defect);
}

KernelMatrix KernelMatrix::assemble(const KernelFunction& kfun,
                                    const Grid& grid) {
  const Eigen::Index n = grid.size();
  CMatrix gram(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index i = 0; i < n; ++i) {
      gram(i, j) = kfun(grid.point(i), grid.point(j));
    }
  }
  return from_gram(grid, std::move(gram));
}

KernelMatrix assemble_kernel(const KernelFunction& kfun, const Grid& grid) {
  return KernelMatrix::assemble(kfun, grid);
}

KernelMatrix delta_kernel(const Grid& grid) {
  return delta_kernel(grid, RVector::Ones(grid.size()));
}

KernelMatrix delta_kernel(const Grid& grid, const RVector& v) {
  if (v.size() != grid.size()) {
    throw Error(ErrorCode::grid_mismatch, "delta kernel profile length differs from grid");
  }
  const RVector diag = v.cwiseQuotient(grid.weights());
  return KernelMatrix::from_gram(grid, diag.cast<cplx>().asDiagonal().toDenseMatrix());
}

bool KernelMatrix::is_real() const noexcept {
  return (gram_.imag().array() == 0.0).all();
}

CMatrix KernelMatrix::weighted_form() const {
  const RVector s = grid_.weights().cwiseSqrt();
  return s.asDiagonal() * gram_ * s.asDiagonal();
}

CMatrix KernelMatrix::operator_matrix() const {
  return gram_ * grid_.weights().asDiagonal();
}

DiscreteFunction KernelMatrix::section(Eigen::Index q) const {
  if (q < 0 || q >= size()) {
    throw Error(ErrorCode::index_out_of_range, "kernel section index out of range");
  }
  return DiscreteFunction(grid_, gram_.col(q));
}

KernelMatrix KernelMatrix::scaled(double factor) const {
  return KernelMatrix(grid_, factor * gram_, std::abs(factor) * hermitian_defect_);
}

PsdReport validate_psd(const KernelMatrix& kernel, double tol_psd) {
  const auto es = decompose(kernel.weighted_form(), false);
  PsdReport r;
  r.min_eigenvalue = es.eigenvalues().minCoeff();
  r.max_eigenvalue = es.eigenvalues().maxCoeff();
  r.tol_psd = tol_psd;
  r.pass = r.min_eigenvalue >= -tol_psd;
  return r;
}

DiscreteFunction apply_operator(const KernelMatrix& kernel,
                                const DiscreteFunction& f) {
  require_aligned(f, kernel.grid(), "operand");
  const CVector wf = kernel.grid().weights().cast<cplx>().cwiseProduct(f.values());
  return DiscreteFunction(kernel.grid(), kernel.gram() * wf);
}

SpectralData SpectralData::compute(const KernelMatrix& kernel,
                                   double cutoff_rel) {
  if (!(cutoff_rel > 0.0 && cutoff_rel < 1.0)) {
    throw Error(ErrorCode::invalid_argument, "cutoff_rel must lie in (0, 1)");
  }
  const auto es = decompose(kernel.weighted_form(), true);
  const Eigen::Index n = kernel.size();
  SpectralData s;
  s.eigenvalues_ = es.eigenvalues().reverse();
  s.eigenvectors_ = es.eigenvectors().rowwise().reverse();
  s.cutoff_rel_ = cutoff_rel;
  s.cutoff_ = cutoff_rel * std::max(s.eigenvalues_[0], 0.0);
  s.rank_ = 0;
  while (s.rank_ < n && s.eigenvalues_[s.rank_] > s.cutoff_) ++s.rank_;
  return s;
}

double SpectralData::max_eigenvalue() const noexcept { return eigenvalues_[0]; }

double SpectralData::min_eigenvalue() const noexcept {
  return eigenvalues_[eigenvalues_.size() - 1];
}

double SpectralData::condition_number() const noexcept {
  if (rank_ == 0) return 0.0;
  return eigenvalues_[0] / eigenvalues_[rank_ - 1];
}

double SpectralData::reconstruction_error(const KernelMatrix& kernel) const {
  const CMatrix form = kernel.weighted_form();
  const CMatrix rebuilt = eigenvectors_ *
                          eigenvalues_.cast<cplx>().asDiagonal() *
                          eigenvectors_.adjoint();
  const double denom = form.norm();
  return denom > 0.0 ? (rebuilt - form).norm() / denom : (rebuilt - form).norm();
}

double SpectralData::orthonormality_defect() const {
  const Eigen::Index n = eigenvectors_.cols();
  return (eigenvectors_.adjoint() * eigenvectors_ - CMatrix::Identity(n, n))
      .cwiseAbs()
      .maxCoeff();
}

KernelSolver::KernelSolver(KernelMatrix kernel, double cutoff_rel)
    : kernel_(std::move(kernel)),
      spectral_(SpectralData::compute(kernel_, cutoff_rel)),
      sqrt_w_(kernel_.grid().weights().cwiseSqrt()) {}

CVector KernelSolver::range_coordinates(const CVector& f) const {
  const Eigen::Index r = spectral_.numerical_rank();
  const CVector a = sqrt_w_.cast<cplx>().cwiseProduct(f);
  return spectral_.eigenvectors().leftCols(r).adjoint() * a;
}

double KernelSolver::range_residual(const CVector& f) const {
  const Eigen::Index r = spectral_.numerical_rank();
  const CVector a = sqrt_w_.cast<cplx>().cwiseProduct(f);
  const double fn = a.norm();
  if (fn == 0.0) return 0.0;
  const auto u = spectral_.eigenvectors().leftCols(r);
  const CVector proj = u * (u.adjoint() * a);
  return (a - proj).norm() / fn;
}

KernelSolve KernelSolver::solve_unchecked(const DiscreteFunction& f) const {
  require_aligned(f, grid(), "right-hand side");
  const Eigen::Index r = spectral_.numerical_rank();
  CVector c = range_coordinates(f.values());
  for (Eigen::Index k = 0; k < r; ++k) c[k] /= spectral_.eigenvalues()[k];
  const CVector y = spectral_.eigenvectors().leftCols(r) * c;
  CVector x = y.cwiseQuotient(sqrt_w_.cast<cplx>());

  const RVector& w = grid().weights();
  const CVector kx = kernel_.gram() * w.cast<cplx>().cwiseProduct(x);
  const double fn = weighted_norm(f.values(), w);
  const double residual = fn > 0.0 ? weighted_norm(kx - f.values(), w) / fn : 0.0;
  return {DiscreteFunction(grid(), std::move(x)), residual};
}

KernelSolve KernelSolver::solve(const DiscreteFunction& f,
                                double range_tol) const {
  KernelSolve out = solve_unchecked(f);
  if (out.range_residual > range_tol) {
    std::ostringstream os;
    os << "right-hand side lies outside the numerical range of the kernel "
          "operator: residual "
       << out.range_residual << " > " << range_tol;
    throw RangeViolation(out.range_residual, range_tol, os.str());
  }
  return out;
}

KernelSolve solve_kernel_system(const KernelMatrix& kernel,
                                const DiscreteFunction& f, double cutoff_rel,
                                double range_tol) {
  return KernelSolver(kernel, cutoff_rel).solve(f, range_tol);
}

}  // namespace rkhslab
