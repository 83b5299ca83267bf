#include <gtest/gtest.h>

#include <array>
#include <cmath>
#include <limits>
#include <numbers>

#include "occtime/quadrature.hpp"
#include "occtime/specfun.hpp"

namespace quad = occtime::quad;

namespace {

double ai(double x) { return occtime::specfun::airy_ai(x).value; }

quad::QuadratureSpec airy_spec(double a = 0.0, double rel = 1e-12) {
  return quad::QuadratureSpec::half_line(a, quad::DecayHint::airy(), rel, 1e-300);
}

}  // namespace

TEST(Quadrature, ElementaryFiniteIntegrals) {
  const auto spec = quad::QuadratureSpec::finite(0.0, 1.0, 1e-13, 1e-15);
  const quad::QuadratureResult r1 = quad::integrate_1d([](double x) { return std::sqrt(x); }, spec);
  EXPECT_TRUE(r1.converged);
  EXPECT_NEAR(r1.value, 2.0 / 3.0, 1e-13);
  const quad::QuadratureResult r2 =
      quad::integrate_1d([](double x) { return 1.0 / std::sqrt(x); }, spec);
  EXPECT_NEAR(r2.value, 2.0, 1e-11);
  const quad::QuadratureResult r3 = quad::integrate_1d(
      [](double x) { return std::cos(x); },
      quad::QuadratureSpec::finite(0.0, std::numbers::pi / 2, 1e-14, 1e-15));
  EXPECT_NEAR(r3.value, 1.0, 1e-14);
}

TEST(Quadrature, ErrorEstimateIsHonest) {
  struct Case {
    double (*f)(double);
    double a, b, exact;
  };
  const Case cases[] = {
      {[](double x) { return std::exp(-x * x); }, 0.0, 3.0, 0.5 * std::sqrt(std::numbers::pi) *
                                                               std::erf(3.0)},
      {[](double x) { return std::log(x); }, 0.0, 1.0, -1.0},
      {[](double x) { return 1.0 / (1.0 + 25.0 * x * x); }, -1.0, 1.0, 0.4 * std::atan(5.0)},
  };
  for (const Case& c : cases) {
    for (double rel : {1e-6, 1e-9, 1e-12}) {
      const quad::QuadratureResult r =
          quad::integrate_1d(c.f, quad::QuadratureSpec::finite(c.a, c.b, rel, 1e-300));
      EXPECT_TRUE(r.converged);
      EXPECT_LE(std::fabs(r.value - c.exact), std::max(r.err_est, 1e-15));
      EXPECT_LE(r.err_est, std::max(rel * std::fabs(c.exact), 1e-15) * 1.0000001);
    }
  }
}

TEST(Quadrature, Linearity) {
  const auto spec = airy_spec();
  auto f = [](double x) { return ai(x); };
  auto g = [](double x) { return x * x * ai(x); };
  const double a = 2.5, b = -0.75;
  const double lhs = quad::integrate_1d([&](double x) { return a * f(x) + b * g(x); }, spec).value;
  const double rhs =
      a * quad::integrate_1d(f, spec).value + b * quad::integrate_1d(g, spec).value;
  EXPECT_NEAR(lhs, rhs, 1e-13);
  // x Ai = Ai'', so int x^2 Ai = Ai(0) after one integration by parts.
  EXPECT_NEAR(quad::integrate_1d(g, spec).value, 0.35502805388781723926, 1e-12);
}

TEST(Quadrature, IntervalAdditivity) {
  auto f = [](double x) { return std::exp(-x) * std::sin(3.0 * x); };
  const double whole =
      quad::integrate_1d(f, quad::QuadratureSpec::finite(0.0, 4.0, 1e-14, 1e-300)).value;
  const double left =
      quad::integrate_1d(f, quad::QuadratureSpec::finite(0.0, 1.3, 1e-14, 1e-300)).value;
  const double right =
      quad::integrate_1d(f, quad::QuadratureSpec::finite(1.3, 4.0, 1e-14, 1e-300)).value;
  EXPECT_NEAR(whole, left + right, 1e-14);
}

TEST(Quadrature, AiryHalfLine) {
  const quad::QuadratureResult r = quad::integrate_1d(ai, airy_spec(0.0, 1e-13));
  EXPECT_TRUE(r.converged);
  EXPECT_NEAR(r.value, 1.0 / 3.0, 1e-14);
  EXPECT_TRUE(std::isfinite(r.cutoff));
  // Starting below zero covers the oscillatory part up to the lower limit.
  const quad::QuadratureResult from_neg = quad::integrate_1d(ai, airy_spec(-2.0, 1e-13));
  const quad::QuadratureResult head = quad::integrate_1d(
      ai, quad::QuadratureSpec::finite(-2.0, 0.0, 1e-14, 1e-300));
  EXPECT_NEAR(from_neg.value, head.value + 1.0 / 3.0, 1e-13);
}

TEST(Quadrature, TailDoublingDoesNotMoveAiryIntegral) {
  const quad::QuadratureSpec spec = airy_spec(0.0, 1e-10);
  const quad::QuadratureResult base = quad::integrate_1d(ai, spec);
  const quad::QuadratureResult doubled = quad::integrate_1d(
      ai, quad::QuadratureSpec::finite(0.0, 2.0 * base.cutoff, 1e-10, 1e-300));
  EXPECT_LE(std::fabs(base.value - doubled.value), std::max(base.err_est, 1e-15));
}

TEST(Quadrature, AlgebraicDecayMap) {
  const quad::QuadratureResult r = quad::integrate_1d(
      [](double x) { return 1.0 / ((1.0 + x) * (1.0 + x) * (1.0 + x)); },
      quad::QuadratureSpec::half_line(0.0, quad::DecayHint::algebraic(-3.0), 1e-13, 1e-300));
  EXPECT_TRUE(r.converged);
  EXPECT_NEAR(r.value, 0.5, 1e-13);
  const quad::QuadratureResult slow = quad::integrate_1d(
      [](double x) { return 1.0 / (1.0 + x * x); },
      quad::QuadratureSpec::half_line(0.0, quad::DecayHint::algebraic(-2.0), 1e-12, 1e-300));
  EXPECT_NEAR(slow.value, std::numbers::pi / 2, 1e-11);
}

TEST(Quadrature, NestedIntegration) {
  const auto specs = quad::nested_specs<2>(
      {quad::QuadratureSpec::finite(0.0, 1.0, 1e-11, 1e-300),
       quad::QuadratureSpec::finite(0.0, 2.0)});
  const quad::QuadratureResult r =
      quad::integrate_nested<2>([](const std::array<double, 2>& p) { return p[0] * p[1] * p[1]; }, specs);
  EXPECT_TRUE(r.converged);
  EXPECT_NEAR(r.value, 0.5 * 8.0 / 3.0, 1e-12);

  // Product of Airy half-lines: (1/3)^2.
  const auto airy2 = quad::nested_specs<2>({airy_spec(0.0, 1e-10), airy_spec(0.0)});
  const quad::QuadratureResult p =
      quad::integrate_nested<2>([](const std::array<double, 2>& p) { return ai(p[0]) * ai(p[1]); }, airy2);
  EXPECT_NEAR(p.value, 1.0 / 9.0, 1e-11);
  EXPECT_GT(p.inner_err, 0.0);
  EXPECT_LE(p.inner_err, p.err_est);
}

TEST(Quadrature, ThreeDimensional) {
  const auto specs = quad::nested_specs<3>({quad::QuadratureSpec::finite(0.0, 1.0, 1e-9, 1e-300),
                                           quad::QuadratureSpec::finite(0.0, 1.0),
                                           quad::QuadratureSpec::finite(0.0, 1.0)});
  const quad::QuadratureResult r = quad::integrate_nested<3>(
      [](const std::array<double, 3>& p) { return std::exp(p[0] + p[1] + p[2]); }, specs);
  const double e1 = std::numbers::e - 1.0;
  EXPECT_NEAR(r.value, e1 * e1 * e1, 1e-8);
  EXPECT_TRUE(r.converged);
}

TEST(Quadrature, BitIdenticalRepeats) {
  auto f = [](double x) { return std::sin(x) * ai(x - 3.0); };
  const auto spec = airy_spec(0.0, 1e-12);
  const quad::QuadratureResult a = quad::integrate_1d(f, spec);
  const quad::QuadratureResult b = quad::integrate_1d(f, spec);
  EXPECT_EQ(a.value, b.value);
  EXPECT_EQ(a.err_est, b.err_est);
  EXPECT_EQ(a.evaluations, b.evaluations);
}

TEST(Quadrature, ReportsNonConvergence) {
  quad::QuadratureSpec spec = quad::QuadratureSpec::finite(0.0, 1.0, 1e-14, 1e-300);
  spec.max_subdivisions = 3;
  const quad::QuadratureResult r =
      quad::integrate_1d([](double x) { return std::sin(200.0 * x); }, spec);
  EXPECT_FALSE(r.converged);
  EXPECT_EQ(r.failed_level, 0);
}

TEST(Quadrature, RejectsBadInput) {
  EXPECT_THROW(quad::integrate_1d([](double) { return 1.0; },
                                  quad::QuadratureSpec::finite(0.0, 1.0, -1.0)),
               std::invalid_argument);
  EXPECT_THROW(quad::integrate_1d([](double) { return 1.0; },
                                  quad::QuadratureSpec::finite(1.0, 0.0)),
               std::invalid_argument);
  EXPECT_THROW(
      quad::integrate_1d([](double) { return 1.0; },
                         quad::QuadratureSpec::half_line(0.0, quad::DecayHint::algebraic(-0.5))),
      std::invalid_argument);
  EXPECT_THROW(quad::integrate_1d(
                   [](double x) { return x > 0.5 ? std::numeric_limits<double>::quiet_NaN() : x; },
                   quad::QuadratureSpec::finite(0.0, 1.0)),
               quad::EvaluationError);
}
