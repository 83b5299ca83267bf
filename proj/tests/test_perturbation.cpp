#include <gtest/gtest.h>

#include <array>
#include <cmath>
#include <numbers>

#include "occtime/perturbation.hpp"

namespace sr = occtime::series;
namespace quad = occtime::quad;

namespace {

constexpr double kPi = std::numbers::pi;

// One fast-tier run shared by the assembly tests.
class Assembled : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    contributions_ = new sr::Contributions(sr::compute_contributions(sr::Tier::fast));
  }
  static void TearDownTestSuite() {
    delete contributions_;
    contributions_ = nullptr;
  }
  static const sr::Contributions& c() { return *contributions_; }

 private:
  static sr::Contributions* contributions_;
};

sr::Contributions* Assembled::contributions_ = nullptr;

}  // namespace

TEST(ClosedForms, NumericValues) {
  EXPECT_NEAR(sr::closed::c2, std::pow(3.0, 1.5) / (4.0 * kPi), 1e-16);
  EXPECT_NEAR(sr::closed::c2, 0.413496672, 5e-10);
  EXPECT_NEAR(sr::closed::q0_c3, std::pow(3.0, 2.5) / (8.0 * kPi) - 1.0, 1e-15);
  EXPECT_NEAR(sr::closed::q0_c4, std::pow(3.0, 3.5) / (8.0 * kPi) - 1.5, 1e-15);
  EXPECT_NEAR(sr::closed::q1_prefactor, 1.25 - std::pow(3.0, 2.5) / (4.0 * kPi), 1e-16);
  EXPECT_NEAR(sr::closed::q1_prefactor, 0.0095099853009679, 1e-15);
  EXPECT_THROW(sr::closed::raw_moment(6, 0.0), std::domain_error);
}

TEST(ReducedWeights, SpotValues) {
  // mpmath: Z(w) = (3/2)/w int_w^inf (1 - (w/t)^{3/2}) Ai(t) dt.
  EXPECT_NEAR(sr::z_weight(1.0).value, 0.062715047242479232298, 1e-14);
  EXPECT_NEAR(sr::z_weight(0.3).value, 0.84335770792460044222, 1e-13);
  // Tail behaviour: Z decays with Ai.
  EXPECT_LT(sr::z_weight(8.0).value, 1e-8);
  EXPECT_GT(sr::z_weight(8.0).value, 0.0);
}

TEST(Q0, FRouteMatchesClosedForms) {
  const sr::Q0Coefficients q = sr::q0_coefficients(1.0, 1e-11);
  ASSERT_TRUE(q.converged);
  EXPECT_NEAR(q.c[2], sr::closed::c2, 1e-10);
  EXPECT_NEAR(q.c[3], sr::closed::q0_c3, 1e-10);
  EXPECT_NEAR(q.c[4], sr::closed::q0_c4, 1e-10);
  for (int n = 2; n <= 4; ++n) EXPECT_LT(q.err[n], 1e-9);
}

TEST(Q0, ClosedIntegralRoute) {
  const sr::Q0Coefficients q = sr::q0_closed_integrals();
  ASSERT_TRUE(q.converged);
  EXPECT_NEAR(q.c[2], sr::closed::c2, 1e-12);
  EXPECT_NEAR(q.c[3], sr::closed::q0_c3, 1e-12);
  EXPECT_NEAR(q.c[4], sr::closed::q0_c4, 1e-12);
}

TEST(Q0, IndependentOfScale) {
  const sr::Q0Coefficients a = sr::q0_coefficients(1.0, 1e-10);
  for (double s : {0.5, 2.0}) {
    const sr::Q0Coefficients b = sr::q0_coefficients(s, 1e-10);
    for (int n = 2; n <= 4; ++n) EXPECT_NEAR(b.c[n], a.c[n], 1e-8) << "s=" << s << " n=" << n;
  }
}

TEST(Q1, ReducedFormMatchesClosedForm) {
  const quad::QuadratureResult q1 = sr::q1_prefactor(1e-11);
  ASSERT_TRUE(q1.converged);
  EXPECT_NEAR(q1.value, sr::closed::q1_prefactor, 1e-10);
  EXPECT_LE(std::fabs(q1.value - sr::closed::q1_prefactor), 10.0 * q1.err_est + 1e-15);
}

TEST(Q1, PrintedTripleIntegral) {
  // (3/2) int dx x^2 Ai(x) int dg int dh g h^{5/3} ((1+g)(1+h))^{-4/3}
  //   Ai(x (1+h)^{2/3}) Ai(x h^{2/3} (1+g)^{2/3}), in the original variables.
  auto ai = [](double x) { return occtime::specfun::airy_ai(x).value; };
  auto f = [&](const std::array<double, 3>& p) {
    const double x = p[0], h = p[1], g = p[2];
    return x * x * ai(x) * g * std::pow(h, 5.0 / 3.0) * std::pow((1 + g) * (1 + h), -4.0 / 3.0) *
           ai(x * std::cbrt((1 + h) * (1 + h))) * ai(x * std::cbrt(h * h * (1 + g) * (1 + g)));
  };
  auto specs = quad::nested_specs<3>(
      {quad::QuadratureSpec::half_line(0.0, quad::DecayHint::airy(), 1e-4, 1e-300),
       quad::QuadratureSpec::half_line(0.0, quad::DecayHint::none(), 1e-4, 1e-300),
       quad::QuadratureSpec::half_line(0.0, quad::DecayHint::none(), 1e-4, 1e-300)},
      10.0);
  for (quad::QuadratureSpec& s : specs) s.max_subdivisions = 20000;
  const quad::QuadratureResult r = quad::integrate_nested<3>(f, specs);
  EXPECT_TRUE(r.converged);
  EXPECT_NEAR(1.5 * r.value, sr::closed::q1_prefactor, 1e-8);
  EXPECT_LE(std::fabs(1.5 * r.value - sr::closed::q1_prefactor), 1.5 * r.err_est);
}

TEST(Q1, IndependentOfScale) {
  const quad::QuadratureResult a = sr::q1_prefactor_at(2.0, 1e-9);
  EXPECT_TRUE(a.converged);
  EXPECT_NEAR(a.value, sr::closed::q1_prefactor, 1e-8);
}

TEST(Q2, CancellationAndTotal) {
  const quad::QuadratureResult q1 = sr::q1_prefactor(1e-11);
  const sr::Q2Report r = sr::q2_prefactor(1e-11, &q1);
  ASSERT_TRUE(r.converged());
  EXPECT_EQ(r.one_piece.value, -q1.value);
  EXPECT_NEAR(r.residual, 0.0, 1e-8);
  EXPECT_LE(std::fabs(r.residual), 10.0 * r.residual_err + 1e-15);
  EXPECT_NEAR(r.total.value, sr::closed::q2_prefactor, 1e-10);
  // The two cancelling pieces are individually sizeable.
  EXPECT_GT(std::fabs(r.h_piece.value), 1e-3);
  EXPECT_NEAR(r.h_piece.value, -r.g_piece.value, 1e-10);
  // Computing q1 internally gives the same report.
  const sr::Q2Report self = sr::q2_prefactor(1e-11);
  EXPECT_NEAR(self.total.value, r.total.value, 1e-13);
}

TEST(Q2, DerivativeFormAgrees) {
  const quad::QuadratureResult d = sr::q2_derivative_form(1e-10);
  EXPECT_TRUE(d.converged);
  EXPECT_NEAR(d.value, sr::closed::q2_prefactor, 1e-9);
}

TEST_F(Assembled, EpsilonFastTier) {
  const sr::EpsilonReport& e = c().eps;
  ASSERT_TRUE(e.result.converged);
  EXPECT_NEAR(e.result.value, sr::kEpsilonReference, 1e-7);
  EXPECT_GT(e.result.value, 0.0);
  EXPECT_LT(e.result.err_est, 1e-9);
  ASSERT_EQ(e.budget.size(), 2u);
  EXPECT_NEAR(e.budget[0].err + e.budget[1].err, e.result.err_est, 1e-15);
}

TEST_F(Assembled, SeriesCoefficients) {
  const sr::SeriesTable t = sr::assemble_series(c());
  EXPECT_TRUE(t.flags.empty());
  EXPECT_EQ(t.coeffs[0], 1.0);
  EXPECT_EQ(t.coeffs[1], -0.5);
  for (int n = 0; n <= 5; ++n) EXPECT_EQ(std::signbit(t.coeffs[n]), n % 2 == 1) << n;
  EXPECT_EQ(t.provenance[2], sr::Provenance::quadrature);
  EXPECT_EQ(t.provenance[5], sr::Provenance::closed_form);
  const sr::SeriesTable closed = sr::assemble_series_closed(c().eps.result.value);
  for (int n = 0; n <= 5; ++n) {
    EXPECT_NEAR(t.coeffs[n], closed.coeffs[n], 10.0 * t.err[n] + 1e-13) << n;
  }
}

TEST_F(Assembled, MismatchIsFlagged) {
  sr::Contributions bad = c();
  bad.q1.value += 1e-6;
  EXPECT_FALSE(sr::assemble_series(bad).flags.empty());
}

TEST_F(Assembled, MomentTableStructure) {
  const sr::MomentTable m = sr::moments(sr::assemble_series(c()));
  EXPECT_TRUE(m.consistent());
  EXPECT_EQ(m.raw[1], 0.5);
  const double e = m.raw_err[2] + m.raw_err[3];
  EXPECT_NEAR(m.raw[3], 1.5 * m.raw[2] - 0.25, 10.0 * e + 1e-13);
  EXPECT_NEAR(m.raw[5], 2.5 * m.raw[4] - 2.5 * m.raw[2] + 0.5, 1e-15);
  for (double v : m.odd_shifted) EXPECT_NEAR(v, 0.0, 1e-9);
  EXPECT_NEAR(m.central2, m.raw[2] - 0.25, 1e-15);
  for (int n = 1; n < 5; ++n) EXPECT_LT(m.raw[n + 1], m.raw[n]);
}

TEST(MomentTable, PrintedDigitsFromClosedForms) {
  const sr::MomentTable m = sr::moments(sr::assemble_series_closed(sr::kEpsilonReference));
  const double printed[6] = {1.0, 0.5, 0.413496672, 0.370245007, 0.342587125, 0.322726133};
  for (int n = 1; n <= 5; ++n) EXPECT_NEAR(m.raw[n], printed[n], 5e-10) << n;
  EXPECT_NEAR(m.central2, 0.163496672, 5e-10);
  EXPECT_NEAR(m.central4, 0.034842117, 5e-10);
}

TEST(MomentTable, TimeDomainPolynomial) {
  const sr::TimePolynomial q = sr::invert_laplace_series(sr::assemble_series_closed(0.00087));
  EXPECT_EQ(q(0.0), 1.0);
  // -dQ/d(pt) at 0 is <T+>/t.
  EXPECT_NEAR(q.coeff[1], -0.5, 1e-15);
  EXPECT_NEAR(q.coeff[2] * 2.0, sr::closed::c2, 1e-15);
  // Q is a Laplace transform in p of a probability density on [0, 1], so it is decreasing.
  EXPECT_LT(q(0.2), q(0.1));
}

TEST(MeanOccupation, Properties) {
  EXPECT_NEAR(sr::mean_occupation(0.0, 0.0, 3.0).value, 1.5, 1e-12);
  // Reflection (x0, v0) -> (-x0, -v0) maps <T+> to t - <T+>.
  for (auto [x0, v0] : {std::pair{0.3, 0.2}, std::pair{-0.5, 1.4}, std::pair{1.1, -2.0}}) {
    const double a = sr::mean_occupation(x0, v0, 2.0).value;
    const double b = sr::mean_occupation(-x0, -v0, 2.0).value;
    EXPECT_NEAR(a + b, 2.0, 1e-11);
  }
  // Scaling: x ~ t^{3/2}, v ~ t^{1/2}.
  const double t = 2.7;
  EXPECT_NEAR(sr::mean_occupation(0.4, -0.3, t).value / t,
              sr::mean_occupation(0.4 / std::pow(t, 1.5), -0.3 / std::sqrt(t), 1.0).value, 1e-11);
  // Monotone in the starting position.
  EXPECT_LT(sr::mean_occupation(-0.1, 0.0, 1.0).value, sr::mean_occupation(0.1, 0.0, 1.0).value);
  EXPECT_NEAR(sr::mean_occupation(1e6, 0.0, 1.0).value, 1.0, 1e-12);
  EXPECT_NEAR(sr::mean_occupation(-1e6, 0.0, 1.0).value, 0.0, 1e-12);
  EXPECT_THROW(sr::mean_occupation(0.0, 0.0, 0.0), std::domain_error);
}
