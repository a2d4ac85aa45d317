#include <cmath>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "rkhslab/error.hpp"
#include "rkhslab/grid.hpp"
#include "rkhslab/random.hpp"

namespace rkhslab {
namespace {

TEST(MakeUniformGrid, TwoPointTrapezoid) {
  const Grid g = make_uniform_grid(0.0, 1.0, 2, QuadratureRule::trapezoid);
  ASSERT_EQ(g.size(), 2);
  EXPECT_DOUBLE_EQ(g.point(0), 0.0);
  EXPECT_DOUBLE_EQ(g.point(1), 1.0);
  EXPECT_DOUBLE_EQ(g.weight(0), 0.5);
  EXPECT_DOUBLE_EQ(g.weight(1), 0.5);
}

TEST(MakeUniformGrid, ThreePointMidpoint) {
  const Grid g = make_uniform_grid(0.0, 1.0, 3, QuadratureRule::midpoint);
  ASSERT_EQ(g.size(), 3);
  EXPECT_NEAR(g.point(0), 1.0 / 6.0, 1e-15);
  EXPECT_NEAR(g.point(1), 0.5, 1e-15);
  EXPECT_NEAR(g.point(2), 5.0 / 6.0, 1e-15);
  for (Eigen::Index i = 0; i < 3; ++i) EXPECT_NEAR(g.weight(i), 1.0 / 3.0, 1e-15);
}

TEST(MakeUniformGrid, LinearDensityIntegratesToOne) {
  // int_0^1 2t dt = 1. The trapezoid rule puts a node at t = 0 where the
  // density vanishes, so the cell-centred rule is used for this measure.
  const Grid g = make_uniform_grid(0.0, 1.0, 101, QuadratureRule::midpoint,
                                   [](double t) { return 2.0 * t; });
  EXPECT_NEAR(g.total_weight(), 1.0, 1e-4);
}

TEST(MakeUniformGrid, DensityVanishingAtNodeIsRejected) {
  try {
    make_uniform_grid(0.0, 1.0, 101, QuadratureRule::trapezoid,
                      [](double t) { return 2.0 * t; });
    FAIL() << "expected non-positive-density";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::non_positive_density);
  }
}

TEST(MakeUniformGrid, TrapezoidDensityAwayFromZero) {
  // int_{0.5}^1 2t dt = 0.75, exact for a linear integrand.
  const Grid g = make_uniform_grid(0.5, 1.0, 101, QuadratureRule::trapezoid,
                                   [](double t) { return 2.0 * t; });
  EXPECT_NEAR(g.total_weight(), 0.75, 1e-12);
}

TEST(MakeUniformGrid, WeightsSumToIntervalLength) {
  for (auto rule : {QuadratureRule::trapezoid, QuadratureRule::midpoint}) {
    for (Eigen::Index n : {1, 2, 7, 100, 401}) {
      const Grid g = make_uniform_grid(-2.0, 3.5, n, rule);
      EXPECT_NEAR(g.total_weight(), 5.5, 5.5 * 1e-12) << n;
      for (Eigen::Index i = 1; i < n; ++i) EXPECT_GT(g.point(i), g.point(i - 1));
    }
  }
}

TEST(MakeUniformGrid, Errors) {
  EXPECT_THROW(make_uniform_grid(1.0, 1.0, 5), Error);
  EXPECT_THROW(make_uniform_grid(2.0, 1.0, 5), Error);
  EXPECT_THROW(make_uniform_grid(0.0, 1.0, 0), Error);
  try {
    make_uniform_grid(0.0, 1.0, 5, QuadratureRule::midpoint, [](double) { return -1.0; });
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::non_positive_density);
  }
  try {
    make_uniform_grid(3.0, 1.0, 5);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::invalid_interval);
  }
}

TEST(Grid, CopiesShareIdentityAndFreshGridsDoNot) {
  const Grid a = make_uniform_grid(0.0, 1.0, 5);
  const Grid b = a;
  const Grid c = make_uniform_grid(0.0, 1.0, 5);
  EXPECT_EQ(a.id(), b.id());
  EXPECT_NE(a.id(), c.id());
  const auto f = DiscreteFunction::zero(a);
  EXPECT_TRUE(f.aligned_to(b));
  EXPECT_FALSE(f.aligned_to(c));
}

TEST(DiscreteFunction, RejectsWrongLengthAndNonFinite) {
  const Grid g = make_uniform_grid(0.0, 1.0, 4);
  EXPECT_THROW(DiscreteFunction(g, CVector::Zero(3)), Error);
  CVector bad = CVector::Zero(4);
  bad[2] = cplx(std::nan(""), 0.0);
  EXPECT_THROW(DiscreteFunction(g, bad), Error);
}

TEST(InnerProductL2, ZeroFunction) {
  const Grid g = make_uniform_grid(0.0, 1.0, 11);
  const auto zero = DiscreteFunction::zero(g);
  const auto f = DiscreteFunction::sample(g, [](double x) { return cplx(std::exp(x), x); });
  EXPECT_EQ(inner_product_l2(zero, f, g), cplx(0.0));
}

TEST(InnerProductL2, OnesGiveIntervalLength) {
  for (auto rule : {QuadratureRule::trapezoid, QuadratureRule::midpoint}) {
    const Grid g = make_uniform_grid(0.0, 1.0, 37, rule);
    const auto one = DiscreteFunction::sample(g, [](double) { return cplx(1.0); });
    EXPECT_NEAR(std::abs(inner_product_l2(one, one, g) - 1.0), 0.0, 1e-14);
  }
}

TEST(InnerProductL2, SquareIntegral) {
  const Grid g = make_uniform_grid(0.0, 1.0, 101);
  const auto f = DiscreteFunction::sample(g, [](double x) { return cplx(x); });
  const cplx ip = inner_product_l2(f, f, g);
  EXPECT_NEAR(ip.real(), 1.0 / 3.0, 1e-4);
  EXPECT_EQ(ip.imag(), 0.0);
}

TEST(InnerProductL2, GridMismatch) {
  const Grid a = make_uniform_grid(0.0, 1.0, 5);
  const Grid b = make_uniform_grid(0.0, 1.0, 5);
  const auto f = DiscreteFunction::zero(a);
  try {
    inner_product_l2(f, f, b);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::grid_mismatch);
  }
}

TEST(InnerProductL2, ConjugateSymmetryIsExact) {
  SeededRng rng(7);
  const Grid g = make_uniform_grid(-1.0, 2.0, 57, QuadratureRule::midpoint,
                                   [](double t) { return std::exp(0.3 * t); });
  for (int trial = 0; trial < 200; ++trial) {
    const bool real_only = trial % 2 == 0;
    const DiscreteFunction f(g, rng.gaussian_vector(g.size(), real_only));
    const DiscreteFunction h(g, rng.gaussian_vector(g.size(), real_only));
    const cplx fg = inner_product_l2(f, h, g);
    const cplx gf = inner_product_l2(h, f, g);
    EXPECT_EQ(fg, std::conj(gf));
    const cplx ff = inner_product_l2(f, f, g);
    EXPECT_EQ(ff.imag(), 0.0);
    EXPECT_GE(ff.real(), 0.0);
  }
}

TEST(InnerProductL2, TrapezoidConvergesQuadratically) {
  // Error of the trapezoid rule for int_0^1 exp(x) cos(x) dx against the
  // closed form; halving h should divide it by 4.
  const auto integrand = [](double x) { return std::exp(x) * std::cos(x); };
  const double exact = 0.5 * (std::exp(1.0) * (std::sin(1.0) + std::cos(1.0)) - 1.0);
  double prev = 0.0;
  for (int intervals : {10, 20, 40, 80}) {
    const Grid g = make_uniform_grid(0.0, 1.0, intervals + 1);
    const auto f = DiscreteFunction::sample(g, [](double x) { return cplx(std::exp(x)); });
    const auto c = DiscreteFunction::sample(g, [](double x) { return cplx(std::cos(x)); });
    const double err = std::abs(inner_product_l2(f, c, g).real() - exact);
    EXPECT_NEAR(err, std::abs(oracle::trapezoid(integrand, 0.0, 1.0, intervals + 1) - exact),
                1e-13);
    if (prev > 0.0) {
      const double ratio = prev / err;
      EXPECT_GT(ratio, 4.0 / 1.5);
      EXPECT_LT(ratio, 4.0 * 1.5);
    }
    prev = err;
  }
}

}  // namespace
}  // namespace rkhslab
