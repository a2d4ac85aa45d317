#pragma once

#include <string_view>
#include <utility>

#include "rkhslab/transform.hpp"

namespace rkhslab {

enum class FeatureFamilyKind { fourier, indicator, gaussian, orthonormal_diagonal };

std::string_view to_string(FeatureFamilyKind kind) noexcept;
FeatureFamilyKind parse_family(std::string_view name);

/// A built-in feature family and its parameters.
///
///  fourier              h(t,p) = exp(-i t p) / sqrt(2 pi) on T = [-band, band];
///                       K(p,q) = sin(band (p-q)) / (pi (p-q))
///  indicator            h(t,p) = 1 if t <= p, T and E the same interval;
///                       K(p,q) = min(p,q) - a on [a, b]
///  gaussian             h(t,p) = exp(-(t-p)^2 / (2 sigma^2));
///                       K(p,q) = sigma sqrt(pi) exp(-(p-q)^2 / (4 sigma^2))
///                       once T covers gaussian_truncation_interval()
///  orthonormal_diagonal rows of diag(m)^(1/2) H diag(w)^(1/2) are the first
///                       `modes` orthonormal cosine vectors on E; with
///                       modes == N the induced operator is the identity
struct FeatureFamily {
  FeatureFamilyKind kind = FeatureFamilyKind::fourier;
  double band = 0.0;
  double sigma = 0.0;
  Eigen::Index modes = 0;

  void validate() const;
};

FeatureMap make_feature_map(const FeatureFamily& family, const Grid& grid_t,
                            const Grid& grid_e);

/// The family's continuous kernel K(p, q). Not defined for
/// orthonormal_diagonal, whose kernel is a delta.
double closed_form_kernel(const FeatureFamily& family, double p, double q,
                          double e_lower = 0.0);

/// max_ij |K_induced(p_i, p_j) - K_closed(p_i, p_j)|.
double closed_form_error(const FeatureFamily& family, const TransformOperator& op);

/// [p_min - 8 sigma, p_max + 8 sigma]. Cutting the Gaussian integrals there
/// changes the kernel by at most sigma sqrt(pi) erfc(8), about 1e-28 * sigma.
std::pair<double, double> gaussian_truncation_interval(double sigma,
                                                       const Grid& grid_e);

}  // namespace rkhslab
