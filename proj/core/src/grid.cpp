#include "rkhslab/grid.hpp"

#include <atomic>
#include <cmath>
#include <sstream>

#include "rkhslab/error.hpp"

namespace rkhslab {

namespace {

GridId next_grid_id() {
  static std::atomic<GridId> counter{1};
  return counter.fetch_add(1, std::memory_order_relaxed);
}

}  // namespace

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::invalid_interval: return "invalid-interval";
    case ErrorCode::invalid_argument: return "invalid-argument";
    case ErrorCode::non_positive_density: return "non-positive-density";
    case ErrorCode::grid_mismatch: return "grid-mismatch";
    case ErrorCode::non_finite: return "non-finite";
    case ErrorCode::non_self_adjoint: return "non-self-adjoint";
    case ErrorCode::range_violation: return "range-violation";
    case ErrorCode::not_injective: return "not-injective";
    case ErrorCode::index_out_of_range: return "index-out-of-range";
    case ErrorCode::incompatible_grids: return "incompatible-grids";
    case ErrorCode::invalid_params: return "invalid-params";
    case ErrorCode::io: return "io";
  }
  return "unknown";
}

std::string_view to_string(QuadratureRule rule) noexcept {
  return rule == QuadratureRule::trapezoid ? "trapezoid" : "midpoint";
}

QuadratureRule parse_rule(std::string_view name) {
  if (name == "trapezoid") return QuadratureRule::trapezoid;
  if (name == "midpoint") return QuadratureRule::midpoint;
  throw Error(ErrorCode::invalid_argument,
              "unknown quadrature rule '" + std::string(name) + "'");
}

Grid::Grid(double lower, double upper, RVector points, RVector weights,
           QuadratureRule rule)
    : id_(next_grid_id()),
      lower_(lower),
      upper_(upper),
      rule_(rule),
      points_(std::move(points)),
      weights_(std::move(weights)) {
  if (!(lower_ < upper_) || !std::isfinite(lower_) || !std::isfinite(upper_)) {
    throw Error(ErrorCode::invalid_interval, "grid interval must satisfy a < b");
  }
  if (points_.size() < 1 || points_.size() != weights_.size()) {
    throw Error(ErrorCode::invalid_argument,
                "grid needs at least one point and one weight per point");
  }
  for (Eigen::Index i = 0; i < points_.size(); ++i) {
    if (!std::isfinite(points_[i]) || !std::isfinite(weights_[i])) {
      throw Error(ErrorCode::non_finite, "grid point or weight is not finite");
    }
    if (!(weights_[i] > 0.0)) {
      std::ostringstream os;
      os << "grid weight " << i << " is not positive (" << weights_[i] << ")";
      throw Error(ErrorCode::non_positive_density, os.str());
    }
    if (i > 0 && !(points_[i] > points_[i - 1])) {
      throw Error(ErrorCode::invalid_argument,
                  "grid points must be strictly increasing");
    }
  }
}

Grid make_uniform_grid(double a, double b, Eigen::Index n, QuadratureRule rule,
                       const Density& density) {
  if (!(a < b)) {
    std::ostringstream os;
    os << "invalid interval [" << a << ", " << b << "]";
    throw Error(ErrorCode::invalid_interval, os.str());
  }
  if (n < 1) throw Error(ErrorCode::invalid_argument, "grid needs n >= 1");

  RVector points(n);
  RVector weights(n);
  const double len = b - a;
  if (rule == QuadratureRule::midpoint || n == 1) {
    const double h = len / static_cast<double>(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      points[i] = a + (static_cast<double>(i) + 0.5) * h;
      weights[i] = h;
    }
  } else {
    const double h = len / static_cast<double>(n - 1);
    for (Eigen::Index i = 0; i < n; ++i) {
      points[i] = a + static_cast<double>(i) * h;
      weights[i] = h;
    }
    points[n - 1] = b;
    weights[0] = 0.5 * h;
    weights[n - 1] = 0.5 * h;
  }

  if (density) {
    for (Eigen::Index i = 0; i < n; ++i) {
      const double d = density(points[i]);
      if (!std::isfinite(d) || !(d > 0.0)) {
        std::ostringstream os;
        os << "density is not positive at t = " << points[i] << " (value "
           << d << ")";
        throw Error(ErrorCode::non_positive_density, os.str());
      }
      weights[i] *= d;
    }
  }
  return Grid(a, b, std::move(points), std::move(weights), rule);
}

DiscreteFunction::DiscreteFunction(const Grid& grid, CVector values)
    : grid_id_(grid.id()), values_(std::move(values)) {
  if (values_.size() != grid.size()) {
    std::ostringstream os;
    os << "function has " << values_.size() << " samples but grid has "
       << grid.size() << " points";
    throw Error(ErrorCode::grid_mismatch, os.str());
  }
  if (!values_.allFinite()) {
    throw Error(ErrorCode::non_finite, "function samples must be finite");
  }
}

DiscreteFunction::DiscreteFunction(GridId id, CVector values)
    : grid_id_(id), values_(std::move(values)) {
  if (!values_.allFinite()) {
    throw Error(ErrorCode::non_finite, "function samples must be finite");
  }
}

DiscreteFunction DiscreteFunction::zero(const Grid& grid) {
  return DiscreteFunction(grid, CVector::Zero(grid.size()));
}

DiscreteFunction DiscreteFunction::sample(
    const Grid& grid, const std::function<cplx(double)>& fn) {
  CVector v(grid.size());
  for (Eigen::Index i = 0; i < grid.size(); ++i) v[i] = fn(grid.point(i));
  return DiscreteFunction(grid, std::move(v));
}

bool DiscreteFunction::is_real() const noexcept {
  return (values_.imag().array() == 0.0).all();
}

namespace {

void require_same(const DiscreteFunction& a, const DiscreteFunction& b) {
  if (a.grid_id() != b.grid_id() || a.size() != b.size()) {
    throw Error(ErrorCode::grid_mismatch,
                "functions are sampled on different grids");
  }
}

}  // namespace

DiscreteFunction operator+(const DiscreteFunction& a,
                           const DiscreteFunction& b) {
  require_same(a, b);
  return DiscreteFunction(a.grid_id_, a.values_ + b.values_);
}

DiscreteFunction operator-(const DiscreteFunction& a,
                           const DiscreteFunction& b) {
  require_same(a, b);
  return DiscreteFunction(a.grid_id_, a.values_ - b.values_);
}

DiscreteFunction operator*(cplx s, const DiscreteFunction& f) {
  return DiscreteFunction(f.grid_id_, s * f.values_);
}

void require_aligned(const DiscreteFunction& f, const Grid& grid,
                     std::string_view what) {
  if (!f.aligned_to(grid)) {
    std::ostringstream os;
    os << what << " is not aligned to the expected grid (" << f.size()
       << " samples, grid has " << grid.size() << " points)";
    throw Error(ErrorCode::grid_mismatch, os.str());
  }
}

cplx weighted_dot(const CVector& f, const CVector& g, const RVector& w) {
  double re = 0.0;
  double im = 0.0;
  for (Eigen::Index i = 0; i < w.size(); ++i) {
    const cplx p = detail::mul_conj(f[i], g[i]);
    re += w[i] * p.real();
    im += w[i] * p.imag();
  }
  return {re, im};
}

double weighted_norm(const CVector& f, const RVector& w) {
  double acc = 0.0;
  for (Eigen::Index i = 0; i < w.size(); ++i) acc += w[i] * std::norm(f[i]);
  return std::sqrt(acc);
}

cplx inner_product_l2(const DiscreteFunction& f, const DiscreteFunction& g,
                      const Grid& grid) {
  require_aligned(f, grid, "first argument");
  require_aligned(g, grid, "second argument");
  return weighted_dot(f.values(), g.values(), grid.weights());
}

double norm_l2(const DiscreteFunction& f, const Grid& grid) {
  require_aligned(f, grid, "function");
  return weighted_norm(f.values(), grid.weights());
}

}  // namespace rkhslab
