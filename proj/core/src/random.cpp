#include "rkhslab/random.hpp"

#include <cmath>
#include <numbers>

namespace rkhslab {

double SeededRng::uniform() {
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double SeededRng::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  double u1 = uniform();
  while (u1 <= 0.0) u1 = uniform();
  const double u2 = uniform();
  const double radius = std::sqrt(-2.0 * std::log(u1));
  const double angle = 2.0 * std::numbers::pi * u2;
  spare_ = radius * std::sin(angle);
  has_spare_ = true;
  return radius * std::cos(angle);
}

std::size_t SeededRng::index(std::size_t n) {
  return static_cast<std::size_t>(uniform() * static_cast<double>(n)) % n;
}

CVector SeededRng::gaussian_vector(Eigen::Index n, bool real_only) {
  CVector out(n);
  if (real_only) {
    for (Eigen::Index i = 0; i < n; ++i) out[i] = cplx(normal(), 0.0);
    return out;
  }
  const double s = std::sqrt(0.5);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double re = normal();
    const double im = normal();
    out[i] = cplx(s * re, s * im);
  }
  return out;
}

}  // namespace rkhslab
