#pragma once

#include <numbers>
#include <vector>

#include "rkhslab/features.hpp"
#include "rkhslab/random.hpp"

namespace rkhslab::fixtures {

inline std::vector<double> to_std(const RVector& v) {
  return std::vector<double>(v.data(), v.data() + v.size());
}

inline std::vector<cplx> to_std(const CVector& v) {
  return std::vector<cplx>(v.data(), v.data() + v.size());
}

/// Random element of the range of K: f = K g.
inline DiscreteFunction random_in_range(const KernelMatrix& k, SeededRng& rng) {
  const DiscreteFunction g(k.grid(), rng.gaussian_vector(k.size(), k.is_real()));
  return apply_operator(k, g);
}

inline KernelMatrix brownian(Eigen::Index n) {
  return assemble_kernel([](double p, double q) { return cplx(std::min(p, q)); },
                         make_uniform_grid(0.0, 1.0, n));
}

inline KernelMatrix exponential(Eigen::Index n, double length = 0.3) {
  return assemble_kernel(
      [length](double p, double q) { return cplx(std::exp(-std::abs(p - q) / length)); },
      make_uniform_grid(0.0, 1.0, n));
}

/// Sinc kernel with band pi on [0, 10]: oversampled, so numerically
/// rank-deficient.
inline KernelMatrix sinc(Eigen::Index n) {
  return assemble_kernel(
      [](double p, double q) {
        const double d = p - q;
        return cplx(d == 0.0 ? 1.0 : std::sin(std::numbers::pi * d) / (std::numbers::pi * d));
      },
      make_uniform_grid(0.0, 10.0, n));
}

/// Hermitian PSD kernel with genuinely complex values.
inline KernelMatrix complex_gaussian(Eigen::Index n) {
  return assemble_kernel(
      [](double p, double q) {
        const double d = p - q;
        return std::exp(-4.0 * d * d) * std::polar(1.0, 3.0 * d);
      },
      make_uniform_grid(0.0, 0.25 * static_cast<double>(n - 1), n));
}

/// Indicator features on [0, 1], midpoint rule on both grids.
inline TransformOperator indicator(Eigen::Index n) {
  const Grid e = make_uniform_grid(0.0, 1.0, n, QuadratureRule::midpoint);
  const Grid t = make_uniform_grid(0.0, 1.0, n, QuadratureRule::midpoint);
  return build_transform(make_feature_map({FeatureFamilyKind::indicator}, t, e));
}

/// Fourier features, band pi, 32 T nodes against 64 E nodes spaced 0.9
/// apart: injective, well conditioned, non-diagonal, complex.
inline TransformOperator fourier_dense() {
  const double pi = std::numbers::pi;
  const Grid t = make_uniform_grid(-pi, pi, 32, QuadratureRule::midpoint);
  const Grid e = make_uniform_grid(-0.45, 63.0 * 0.9 + 0.45, 64, QuadratureRule::midpoint);
  FeatureFamily fam{FeatureFamilyKind::fourier};
  fam.band = pi;
  return build_transform(make_feature_map(fam, t, e));
}

/// Fourier features, band pi, M = N = 64, E on the integers 0..63. With
/// a density on T the operator is non-diagonal; without one it is the
/// unitary sampling case.
inline TransformOperator fourier_square(bool with_density) {
  const double pi = std::numbers::pi;
  Density density;
  if (with_density) density = [pi](double t) { return 1.0 + 0.5 * t / pi; };
  const Grid t = make_uniform_grid(-pi, pi, 64, QuadratureRule::midpoint, density);
  const Grid e = make_uniform_grid(-0.5, 63.5, 64, QuadratureRule::midpoint);
  FeatureFamily fam{FeatureFamilyKind::fourier};
  fam.band = pi;
  return build_transform(make_feature_map(fam, t, e));
}

inline TransformOperator orthonormal_diagonal(Eigen::Index n) {
  const Grid e = make_uniform_grid(0.0, 1.0, n, QuadratureRule::trapezoid);
  const Grid t = make_uniform_grid(0.0, 1.0, n, QuadratureRule::midpoint);
  FeatureFamily fam{FeatureFamilyKind::orthonormal_diagonal};
  fam.modes = n;
  return build_transform(make_feature_map(fam, t, e));
}

/// Gaussian bumps of width 0.1 centred on E nodes spaced 0.3 apart: T = E,
/// injective and well conditioned.
inline TransformOperator gaussian_narrow() {
  const Grid e = make_uniform_grid(0.0, 6.0, 21, QuadratureRule::trapezoid);
  const Grid t = make_uniform_grid(0.0, 6.0, 21, QuadratureRule::trapezoid);
  FeatureFamily fam{FeatureFamilyKind::gaussian};
  fam.sigma = 0.1;
  return build_transform(make_feature_map(fam, t, e));
}

}  // namespace rkhslab::fixtures
