#pragma once

#include <cstdint>
#include <functional>
#include <string_view>

#include "rkhslab/linalg.hpp"

namespace rkhslab {

enum class QuadratureRule { trapezoid, midpoint };

std::string_view to_string(QuadratureRule rule) noexcept;
QuadratureRule parse_rule(std::string_view name);

using GridId = std::uint64_t;

/// Quadrature nodes and positive weights on an interval [lower, upper].
///
/// Every grid receives a process-unique id at construction; copies share
/// it. Functions record the id of the grid they were sampled on, and
/// alignment checks compare ids and lengths rather than coordinates.
class Grid {
 public:
  Grid(double lower, double upper, RVector points, RVector weights,
       QuadratureRule rule);

  GridId id() const noexcept { return id_; }
  Eigen::Index size() const noexcept { return points_.size(); }
  double lower() const noexcept { return lower_; }
  double upper() const noexcept { return upper_; }
  double length() const noexcept { return upper_ - lower_; }
  QuadratureRule rule() const noexcept { return rule_; }
  const RVector& points() const noexcept { return points_; }
  const RVector& weights() const noexcept { return weights_; }
  double point(Eigen::Index i) const { return points_[i]; }
  double weight(Eigen::Index i) const { return weights_[i]; }
  double total_weight() const noexcept { return weights_.sum(); }

 private:
  GridId id_;
  double lower_;
  double upper_;
  QuadratureRule rule_;
  RVector points_;
  RVector weights_;
};

/// Positive density realizing dm(t) = density(t) dt.
using Density = std::function<double(double)>;

/// Composite rule with n nodes on [a, b]. Trapezoid places nodes at both
/// endpoints (n == 1 degenerates to the midpoint node); midpoint places
/// them at cell centres. With a density, each weight is multiplied by the
/// density sampled at its node.
Grid make_uniform_grid(double a, double b, Eigen::Index n,
                       QuadratureRule rule = QuadratureRule::trapezoid,
                       const Density& density = {});

/// Complex samples of a function on a particular grid.
class DiscreteFunction {
 public:
  DiscreteFunction(const Grid& grid, CVector values);

  static DiscreteFunction zero(const Grid& grid);
  static DiscreteFunction sample(const Grid& grid,
                                 const std::function<cplx(double)>& fn);

  GridId grid_id() const noexcept { return grid_id_; }
  Eigen::Index size() const noexcept { return values_.size(); }
  const CVector& values() const noexcept { return values_; }
  cplx operator[](Eigen::Index i) const { return values_[i]; }

  bool aligned_to(const Grid& grid) const noexcept {
    return grid_id_ == grid.id() && values_.size() == grid.size();
  }

  bool is_real() const noexcept;

  friend DiscreteFunction operator+(const DiscreteFunction& a,
                                    const DiscreteFunction& b);
  friend DiscreteFunction operator-(const DiscreteFunction& a,
                                    const DiscreteFunction& b);
  friend DiscreteFunction operator*(cplx s, const DiscreteFunction& f);

 private:
  DiscreteFunction(GridId id, CVector values);

  GridId grid_id_;
  CVector values_;
};

/// Throws grid_mismatch unless f is aligned to grid.
void require_aligned(const DiscreteFunction& f, const Grid& grid,
                     std::string_view what);

/// sum_i w_i * f_i * conj(g_i) on raw vectors.
cplx weighted_dot(const CVector& f, const CVector& g, const RVector& w);

/// sqrt(sum_i w_i |f_i|^2).
double weighted_norm(const CVector& f, const RVector& w);

/// Discrete L2 inner product, conjugate-linear in g.
cplx inner_product_l2(const DiscreteFunction& f, const DiscreteFunction& g,
                      const Grid& grid);

double norm_l2(const DiscreteFunction& f, const Grid& grid);

}  // namespace rkhslab
