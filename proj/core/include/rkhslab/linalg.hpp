#pragma once

#include <complex>

#include <Eigen/Dense>

namespace rkhslab {

using cplx = std::complex<double>;
using RVector = Eigen::VectorXd;
using CVector = Eigen::VectorXcd;
using CMatrix = Eigen::MatrixXcd;

namespace detail {

// Product a * conj(b) in explicit real arithmetic. Swapping the arguments
// yields the exact complex conjugate, which keeps weighted sums built on
// it bit-for-bit conjugate symmetric.
inline cplx mul_conj(cplx a, cplx b) noexcept {
  const double re = a.real() * b.real() + a.imag() * b.imag();
  const double im = a.imag() * b.real() - a.real() * b.imag();
  return {re, im};
}

inline bool all_finite(const CVector& v) noexcept { return v.allFinite(); }
inline bool all_finite(const CMatrix& m) noexcept { return m.allFinite(); }

}  // namespace detail
}  // namespace rkhslab
