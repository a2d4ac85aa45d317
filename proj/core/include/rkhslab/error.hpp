#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace rkhslab {

enum class ErrorCode {
  invalid_interval,
  invalid_argument,
  non_positive_density,
  grid_mismatch,
  non_finite,
  non_self_adjoint,
  range_violation,
  not_injective,
  index_out_of_range,
  incompatible_grids,
  invalid_params,
  io,
};

std::string_view to_string(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

// Raised when data lies outside the numerical range of an operator. The
// relative residual that triggered the rejection travels with the exception.
class RangeViolation : public Error {
 public:
  RangeViolation(double residual, double tolerance, const std::string& what)
      : Error(ErrorCode::range_violation, what),
        residual_(residual),
        tolerance_(tolerance) {}

  double residual() const noexcept { return residual_; }
  double tolerance() const noexcept { return tolerance_; }

 private:
  double residual_;
  double tolerance_;
};

}  // namespace rkhslab
