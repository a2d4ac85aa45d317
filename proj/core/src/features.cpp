#include "rkhslab/features.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "rkhslab/error.hpp"

namespace rkhslab {

namespace {

bool close(double a, double b, double scale) {
  return std::abs(a - b) <= 1e-9 * std::max(1.0, scale);
}

[[noreturn]] void incompatible(const std::string& msg) {
  throw Error(ErrorCode::incompatible_grids, msg);
}

}  // namespace

std::string_view to_string(FeatureFamilyKind kind) noexcept {
  switch (kind) {
    case FeatureFamilyKind::fourier: return "fourier";
    case FeatureFamilyKind::indicator: return "indicator";
    case FeatureFamilyKind::gaussian: return "gaussian";
    case FeatureFamilyKind::orthonormal_diagonal: return "orthonormal_diagonal";
  }
  return "unknown";
}

FeatureFamilyKind parse_family(std::string_view name) {
  if (name == "fourier") return FeatureFamilyKind::fourier;
  if (name == "indicator") return FeatureFamilyKind::indicator;
  if (name == "gaussian") return FeatureFamilyKind::gaussian;
  if (name == "orthonormal_diagonal") return FeatureFamilyKind::orthonormal_diagonal;
  throw Error(ErrorCode::invalid_params,
              "unknown feature family '" + std::string(name) + "'");
}

void FeatureFamily::validate() const {
  switch (kind) {
    case FeatureFamilyKind::fourier:
      if (!(band > 0.0) || !std::isfinite(band)) {
        throw Error(ErrorCode::invalid_params, "fourier family needs band > 0");
      }
      break;
    case FeatureFamilyKind::gaussian:
      if (!(sigma > 0.0) || !std::isfinite(sigma)) {
        throw Error(ErrorCode::invalid_params, "gaussian family needs sigma > 0");
      }
      break;
    case FeatureFamilyKind::orthonormal_diagonal:
      if (modes < 1) {
        throw Error(ErrorCode::invalid_params,
                    "orthonormal_diagonal family needs modes >= 1");
      }
      break;
    case FeatureFamilyKind::indicator:
      break;
  }
}

FeatureMap make_feature_map(const FeatureFamily& family, const Grid& grid_t,
                            const Grid& grid_e) {
  family.validate();
  const Eigen::Index M = grid_t.size();
  const Eigen::Index N = grid_e.size();
  CMatrix h(M, N);

  switch (family.kind) {
    case FeatureFamilyKind::fourier: {
      if (!close(grid_t.lower(), -family.band, family.band) ||
          !close(grid_t.upper(), family.band, family.band)) {
        std::ostringstream os;
        os << "fourier family needs T = [-" << family.band << ", "
           << family.band << "], got [" << grid_t.lower() << ", "
           << grid_t.upper() << "]";
        incompatible(os.str());
      }
      const double norm = 1.0 / std::sqrt(2.0 * std::numbers::pi);
      for (Eigen::Index i = 0; i < N; ++i) {
        for (Eigen::Index k = 0; k < M; ++k) {
          const double phase = -grid_t.point(k) * grid_e.point(i);
          h(k, i) = cplx(norm * std::cos(phase), norm * std::sin(phase));
        }
      }
      break;
    }
    case FeatureFamilyKind::indicator: {
      const double scale = std::max(std::abs(grid_e.lower()), std::abs(grid_e.upper()));
      if (!close(grid_t.lower(), grid_e.lower(), scale) ||
          !close(grid_t.upper(), grid_e.upper(), scale)) {
        incompatible("indicator family needs T and E to be the same interval");
      }
      for (Eigen::Index i = 0; i < N; ++i) {
        for (Eigen::Index k = 0; k < M; ++k) {
          h(k, i) = grid_t.point(k) <= grid_e.point(i) ? 1.0 : 0.0;
        }
      }
      break;
    }
    case FeatureFamilyKind::gaussian: {
      const double s2 = 2.0 * family.sigma * family.sigma;
      for (Eigen::Index i = 0; i < N; ++i) {
        for (Eigen::Index k = 0; k < M; ++k) {
          const double d = grid_t.point(k) - grid_e.point(i);
          h(k, i) = std::exp(-d * d / s2);
        }
      }
      break;
    }
    case FeatureFamilyKind::orthonormal_diagonal: {
      if (M != family.modes) {
        std::ostringstream os;
        os << "orthonormal_diagonal family with " << family.modes
           << " modes needs a T grid of that many points, got " << M;
        incompatible(os.str());
      }
      if (M > N) {
        incompatible("orthonormal_diagonal family needs modes <= number of E points");
      }
      // Orthonormal DCT-II rows, unscaled by the two sets of weights.
      const double n = static_cast<double>(N);
      for (Eigen::Index k = 0; k < M; ++k) {
        const double alpha = k == 0 ? std::sqrt(1.0 / n) : std::sqrt(2.0 / n);
        for (Eigen::Index i = 0; i < N; ++i) {
          const double q = alpha * std::cos(std::numbers::pi * static_cast<double>(k) *
                                            (static_cast<double>(i) + 0.5) / n);
          h(k, i) = q / std::sqrt(grid_t.weight(k) * grid_e.weight(i));
        }
      }
      break;
    }
  }
  return FeatureMap(grid_t, grid_e, std::move(h));
}

double closed_form_kernel(const FeatureFamily& family, double p, double q,
                          double e_lower) {
  switch (family.kind) {
    case FeatureFamilyKind::fourier: {
      const double d = p - q;
      if (d == 0.0) return family.band / std::numbers::pi;
      return std::sin(family.band * d) / (std::numbers::pi * d);
    }
    case FeatureFamilyKind::indicator:
      return std::min(p, q) - e_lower;
    case FeatureFamilyKind::gaussian: {
      const double d = p - q;
      return family.sigma * std::sqrt(std::numbers::pi) *
             std::exp(-d * d / (4.0 * family.sigma * family.sigma));
    }
    case FeatureFamilyKind::orthonormal_diagonal:
      break;
  }
  throw Error(ErrorCode::invalid_params,
              "orthonormal_diagonal family has no pointwise closed-form kernel");
}

double closed_form_error(const FeatureFamily& family, const TransformOperator& op) {
  const Grid& e = op.grid_e();
  const CMatrix& gram = op.induced().gram();
  double err = 0.0;
  for (Eigen::Index j = 0; j < e.size(); ++j) {
    for (Eigen::Index i = 0; i < e.size(); ++i) {
      const double exact = closed_form_kernel(family, e.point(i), e.point(j), e.lower());
      err = std::max(err, std::abs(gram(i, j) - exact));
    }
  }
  return err;
}

std::pair<double, double> gaussian_truncation_interval(double sigma,
                                                       const Grid& grid_e) {
  return {grid_e.point(0) - 8.0 * sigma,
          grid_e.point(grid_e.size() - 1) + 8.0 * sigma};
}

}  // namespace rkhslab
