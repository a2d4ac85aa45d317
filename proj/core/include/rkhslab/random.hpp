#pragma once

#include <cstdint>
#include <random>

#include "rkhslab/linalg.hpp"

namespace rkhslab {

/// Seeded source of trial vectors.
///
/// Built on std::mt19937_64, whose output sequence is fixed by the
/// standard. Uniform and normal variates are derived here rather than via
/// the <random> distributions, whose algorithms vary between standard
/// library implementations, so a seed names the same trial vectors on
/// every platform.
class SeededRng {
 public:
  explicit SeededRng(std::uint64_t seed) : engine_(seed), seed_(seed) {}

  std::uint64_t seed() const noexcept { return seed_; }

  /// Uniform on [0, 1).
  double uniform();
  /// Standard normal (Box-Muller).
  double normal();
  /// Uniform integer on [0, n).
  std::size_t index(std::size_t n);

  /// Vector of n standard normals; complex entries draw independent real
  /// and imaginary parts scaled by 1/sqrt(2) unless real_only is set.
  CVector gaussian_vector(Eigen::Index n, bool real_only);

 private:
  std::mt19937_64 engine_;
  std::uint64_t seed_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace rkhslab
