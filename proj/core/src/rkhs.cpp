#include "rkhslab/rkhs.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "rkhslab/error.hpp"

namespace rkhslab {

namespace {

void check_index(const Grid& grid, Eigen::Index q) {
  if (q < 0 || q >= grid.size()) {
    std::ostringstream os;
    os << "grid index " << q << " out of range [0, " << grid.size() << ")";
    throw Error(ErrorCode::index_out_of_range, os.str());
  }
}

}  // namespace

RkhsSpace::RkhsSpace(KernelMatrix kernel, double cutoff_rel, double range_tol)
    : solver_(std::move(kernel), cutoff_rel), range_tol_(range_tol) {
  if (!(range_tol > 0.0)) {
    throw Error(ErrorCode::invalid_argument, "range tolerance must be positive");
  }
  const Eigen::Index r = spectral().numerical_rank();
  const RVector sqrt_w = grid().weights().cwiseSqrt();
  scaled_section_coords_ = spectral().eigenvectors().leftCols(r).adjoint() *
                           (sqrt_w.asDiagonal() * this->kernel().gram());
  for (Eigen::Index k = 0; k < r; ++k) {
    scaled_section_coords_.row(k) /= spectral().eigenvalues()[k];
  }
}

CVector RkhsSpace::pair_with_sections(const CVector& f) const {
  const CVector cf = solver_.range_coordinates(f);
  return scaled_section_coords_.adjoint() * cf;
}

RVector RkhsSpace::section_norms_squared() const {
  const Eigen::Index r = spectral().numerical_rank();
  const Eigen::Index n = grid().size();
  RVector out = RVector::Zero(n);
  for (Eigen::Index q = 0; q < n; ++q) {
    double acc = 0.0;
    for (Eigen::Index k = 0; k < r; ++k) {
      acc += std::norm(scaled_section_coords_(k, q)) * spectral().eigenvalues()[k];
    }
    out[q] = acc;
  }
  return out;
}

double RkhsSpace::reconstruction_error() const {
  return spectral().reconstruction_error(kernel());
}

double RkhsSpace::range_residual(const DiscreteFunction& f) const {
  require_aligned(f, grid(), "function");
  return solver_.range_residual(f.values());
}

void RkhsSpace::require_in_range(const DiscreteFunction& f,
                                 std::string_view what) const {
  const double res = range_residual(f);
  if (res > range_tol_) {
    std::ostringstream os;
    os << what << " lies outside the numerical range of K: residual " << res
       << " > " << range_tol_;
    throw RangeViolation(res, range_tol_, os.str());
  }
}

// In the retained eigenbasis of W^(1/2) G W^(1/2), K^-1 f paired with g is
// sum_k c_k(f) conj(c_k(g)) / lambda_k.
cplx RkhsSpace::inner_unchecked(const CVector& f, const CVector& g) const {
  const CVector cf = solver_.range_coordinates(f);
  const CVector cg = solver_.range_coordinates(g);
  const RVector& lambda = spectral().eigenvalues();
  double re = 0.0;
  double im = 0.0;
  for (Eigen::Index k = 0; k < cf.size(); ++k) {
    const cplx p = detail::mul_conj(cf[k], cg[k]);
    re += p.real() / lambda[k];
    im += p.imag() / lambda[k];
  }
  return {re, im};
}

double RkhsSpace::norm_unchecked(const CVector& f) const {
  const CVector cf = solver_.range_coordinates(f);
  const RVector& lambda = spectral().eigenvalues();
  double acc = 0.0;
  for (Eigen::Index k = 0; k < cf.size(); ++k) acc += std::norm(cf[k]) / lambda[k];
  return std::sqrt(acc);
}

cplx rkhs_inner(const RkhsSpace& space, const DiscreteFunction& f,
                const DiscreteFunction& g) {
  space.require_in_range(f, "first argument");
  space.require_in_range(g, "second argument");
  return space.inner_unchecked(f.values(), g.values());
}

double rkhs_norm(const RkhsSpace& space, const DiscreteFunction& f) {
  space.require_in_range(f, "function");
  return space.norm_unchecked(f.values());
}

double check_reproducing(const RkhsSpace& space, const DiscreteFunction& f,
                         Eigen::Index q_index) {
  check_index(space.grid(), q_index);
  space.require_in_range(f, "function");
  const CVector section = space.kernel().gram().col(q_index);
  const cplx lhs = space.inner_unchecked(f.values(), section);
  const cplx fq = f[q_index];
  return std::abs(lhs - fq) / (1.0 + std::abs(fq));
}

double max_reproducing_residual(const RkhsSpace& space, const DiscreteFunction& f) {
  space.require_in_range(f, "function");
  const CVector paired = space.pair_with_sections(f.values());
  double worst = 0.0;
  for (Eigen::Index q = 0; q < paired.size(); ++q) {
    worst = std::max(worst, std::abs(paired[q] - f[q]) / (1.0 + std::abs(f[q])));
  }
  return worst;
}

PointEvalBound point_eval_bound(const RkhsSpace& space,
                                const DiscreteFunction& f,
                                Eigen::Index q_index) {
  check_index(space.grid(), q_index);
  space.require_in_range(f, "function");
  PointEvalBound b;
  b.lhs = std::abs(f[q_index]);
  const double kqq = std::max(space.kernel()(q_index, q_index).real(), 0.0);
  b.rhs = space.norm_unchecked(f.values()) * std::sqrt(kqq);
  b.holds = b.lhs <= b.rhs * (1.0 + 1e-10);
  return b;
}

SectionProjection project_onto_sections(const RkhsSpace& space,
                                        std::span<const Eigen::Index> indices,
                                        const DiscreteFunction& f) {
  if (indices.empty()) {
    throw Error(ErrorCode::invalid_argument, "section index set is empty");
  }
  std::vector<Eigen::Index> sorted(indices.begin(), indices.end());
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
    throw Error(ErrorCode::invalid_argument, "section indices must be distinct");
  }
  for (Eigen::Index q : indices) check_index(space.grid(), q);
  space.require_in_range(f, "function");

  const CMatrix& gram = space.kernel().gram();
  const auto m = static_cast<Eigen::Index>(indices.size());
  CMatrix sub(m, m);
  CVector rhs(m);
  CMatrix sections(gram.rows(), m);
  for (Eigen::Index a = 0; a < m; ++a) {
    rhs[a] = f[indices[a]];
    sections.col(a) = gram.col(indices[a]);
    for (Eigen::Index b = 0; b < m; ++b) sub(a, b) = gram(indices[a], indices[b]);
  }

  Eigen::SelfAdjointEigenSolver<CMatrix> es(sub);
  const RVector& lambda = es.eigenvalues();
  const double lmax = std::max(lambda.cwiseAbs().maxCoeff(), 0.0);
  const double cut = space.cutoff_rel() * lmax;
  CVector c = es.eigenvectors().adjoint() * rhs;
  Eigen::Index rank = 0;
  for (Eigen::Index k = 0; k < m; ++k) {
    if (lambda[k] > cut) {
      c[k] /= lambda[k];
      ++rank;
    } else {
      c[k] = 0.0;
    }
  }

  SectionProjection out;
  out.coefficients = es.eigenvectors() * c;
  out.rank = rank;
  out.reduced_rank = rank < m;
  const CVector residual = f.values() - sections * out.coefficients;
  out.residual_norm = space.norm_unchecked(residual);
  return out;
}

DiscreteFunction discrete_delta(const Grid& grid, Eigen::Index q_index) {
  check_index(grid, q_index);
  CVector v = CVector::Zero(grid.size());
  v[q_index] = 1.0 / grid.weight(q_index);
  return DiscreteFunction(grid, std::move(v));
}

}  // namespace rkhslab
