#pragma once

// Perturbative expansion of the Laplace-space generating function at the
// origin, Q(s) = sum_n c_n p^n / s^{n+1}, through p^5, and the occupation-time
// moments that follow from it.
//
// The contributions are organised by the iteration that produces them:
//   q0  the inhomogeneous term a_0 (orders p .. p^4),
//   q1  the first iterate with the undifferentiated Airy factors (p^3, p^4),
//   q2  the Airy-derivative part of the first iterate (p^4),
//   eps the first iterate applied to the p^2 part of a_0 (p^4).
//
// The innermost g and z integrals are written in the Airy argument
// t = c (1+g)^{2/3} = w z^{2/3}, and the h integral in y = x h^{2/3}; after
// that the remaining x integral separates. In those variables
//   Z(w)  = int_1^inf dz (z-1) z^{-4/3} Ai(w z^{2/3})
//         = int_0^inf dg g (1+g)^{-4/3} Ai(w (1+g)^{2/3}),
//   M(a,b) = S^{-4/3} Ai(S^{2/3}),  S = a^{3/2} + b^{3/2},
//   V(y)  = int_0^inf dx Ai(x) M(x, y),
// and, for example, the q1 prefactor is (9/4) int_0^inf dy y^3 Z(y) V(y).

#include <array>
#include <cmath>
#include <functional>
#include <future>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include "occtime/quadrature.hpp"
#include "occtime/specfun.hpp"

namespace occtime::series {

inline constexpr double kPi = std::numbers::pi;
inline const double kSqrt3 = std::sqrt(3.0);

namespace closed {
inline const double c2 = 3.0 * kSqrt3 / (4.0 * kPi);
inline const double q0_c3 = 9.0 * kSqrt3 / (8.0 * kPi) - 1.0;
inline const double q0_c4 = 27.0 * kSqrt3 / (8.0 * kPi) - 1.5;
inline const double q1_prefactor = 1.25 - 9.0 * kSqrt3 / (4.0 * kPi);
inline const double q2_prefactor = -q1_prefactor;

// Occupation moments <T+^n>/t^n in terms of eps.
inline double raw_moment(int n, double eps) {
  switch (n) {
    case 0: return 1.0;
    case 1: return 0.5;
    case 2: return c2;
    case 3: return 9.0 * kSqrt3 / (8.0 * kPi) - 0.25;
    case 4: return 7.0 * 9.0 * kSqrt3 / (8.0 * kPi) - 4.0 + eps;
    case 5: return 95.0 * 3.0 * kSqrt3 / (16.0 * kPi) - 9.5 + 2.5 * eps;
    default: throw std::domain_error("raw_moment: order must be in 0..5");
  }
}
}  // namespace closed

// Value quoted to ten decimals for the constant eps; used only for comparison.
inline constexpr double kEpsilonReference = 0.0008720732;

enum class Provenance { closed_form, quadrature, mixed };

inline const char* to_string(Provenance p) {
  switch (p) {
    case Provenance::closed_form: return "closed_form";
    case Provenance::quadrature: return "quadrature";
    case Provenance::mixed: return "mixed";
  }
  return "unknown";
}

enum class Tier { fast, paper };

struct TierTolerances {
  double outer_rel;    // outermost level of the 2-3 dimensional integrals
  double epsilon_rel;  // outermost level of the eps integral
};

inline TierTolerances tolerances(Tier tier) {
  if (tier == Tier::paper) return {1e-12, 1e-10};
  return {1e-10, 1e-7};
}

namespace detail {

using quad::Sample;

inline Sample product(const Sample& a, const Sample& b) {
  Sample r;
  r.value = a.value * b.value;
  r.err = std::fabs(a.value) * b.err + std::fabs(b.value) * a.err;
  r.evaluations = a.evaluations + b.evaluations;
  r.converged = a.converged && b.converged;
  r.failed_level = a.failed_level >= 0 ? a.failed_level : b.failed_level;
  return r;
}

inline Sample scaled(Sample a, double c) {
  a.value *= c;
  a.err *= std::fabs(c);
  return a;
}

inline Sample sum(const Sample& a, const Sample& b) {
  Sample r = a;
  r.value += b.value;
  r.err += b.err;
  r.evaluations += b.evaluations;
  r.converged = a.converged && b.converged;
  if (r.failed_level < 0) r.failed_level = b.failed_level;
  return r;
}

inline double ai(double x) { return specfun::airy_ai(x).value; }

inline quad::QuadratureSpec airy_half_line(double lower, double rel_tol) {
  quad::QuadratureSpec spec =
      quad::QuadratureSpec::half_line(lower, quad::DecayHint::airy(), rel_tol, 1e-300);
  spec.max_subdivisions = 10000;
  return spec;
}

inline double inner_rel(double rel_tol) { return std::max(rel_tol / 100.0, quad::kInnerRelFloor); }

// int_1^inf dz P(z) Ai(w z^{2/3}) in the variable t = w z^{2/3}.
template <class Poly>
Sample z_moment(const Poly& poly, double w, double rel_tol, int level) {
  const double w32 = w * std::sqrt(w);
  auto f = [&](double t) {
    const double r = t / w;
    return poly(r * std::sqrt(r)) * 1.5 * std::sqrt(t) / w32 * ai(t);
  };
  return quad::to_sample(quad::integrate_1d(f, airy_half_line(w, rel_tol), level));
}

}  // namespace detail

/// Z(w) = int_1^inf (z-1) z^{-4/3} Ai(w z^{2/3}) dz, w > 0.
inline quad::Sample z_weight(double w, double rel_tol = 1e-13, int level = 0) {
  if (!(w > 0.0)) throw std::domain_error("z_weight: w must be positive");
  auto f = [w](double t) {
    const double q = w / t;
    return (1.0 - q * std::sqrt(q)) * detail::ai(t);
  };
  quad::Sample r =
      quad::to_sample(quad::integrate_1d(f, detail::airy_half_line(w, rel_tol), level));
  return detail::scaled(r, 1.5 / w);
}

/// Z2(w) = int_0^inf dg g (1+g)^{-7/3} Ai(w (1+g)^{2/3}).
inline quad::Sample z2_weight(double w, double rel_tol = 1e-13, int level = 0) {
  if (!(w > 0.0)) throw std::domain_error("z2_weight: w must be positive");
  auto f = [w](double t) {
    const double q = w / t;
    const double q32 = q * std::sqrt(q);
    return (q32 - q32 * q32) * detail::ai(t);
  };
  quad::Sample r =
      quad::to_sample(quad::integrate_1d(f, detail::airy_half_line(w, rel_tol), level));
  return detail::scaled(r, 1.5 / w);
}

/// Z3(w) = int_0^inf dg g (1+g)^{-5/3} Ai'(w (1+g)^{2/3}).
inline quad::Sample z3_weight(double w, double rel_tol = 1e-13, int level = 0) {
  if (!(w > 0.0)) throw std::domain_error("z3_weight: w must be positive");
  auto f = [w](double t) {
    const double q = w / t;
    return (std::sqrt(q) - q * q) * specfun::airy_ai_prime(t).value;
  };
  quad::Sample r =
      quad::to_sample(quad::integrate_1d(f, detail::airy_half_line(w, rel_tol), level));
  return detail::scaled(r, 1.5 / w);
}

/// M(a,b) = S^{-4/3} Ai(S^{2/3}) with S = a^{3/2} + b^{3/2}.
inline double m_weight(double a, double b) {
  const double S = a * std::sqrt(a) + b * std::sqrt(b);
  if (S == 0.0) return 0.0;  // only reached with a zero weight in front
  const double S23 = std::cbrt(S * S);
  return detail::ai(S23) / (S23 * S23);
}

namespace detail {

// int_0^inf dx Ai(x) M(x,y) weight(x, y).
template <class Weight>
Sample x_integral(double y, double rel_tol, int level, const Weight& weight) {
  auto f = [&](double x) { return ai(x) * m_weight(x, y) * weight(x, y); };
  return quad::to_sample(quad::integrate_1d(f, airy_half_line(0.0, rel_tol), level));
}

}  // namespace detail

inline quad::Sample v_weight(double y, double rel_tol = 1e-13, int level = 0) {
  return detail::x_integral(y, rel_tol, level, [](double, double) { return 1.0; });
}

/// V(y) with the extra factor 2/(1+h) = 2 x^{3/2} / (x^{3/2} + y^{3/2}).
inline quad::Sample vh_weight(double y, double rel_tol = 1e-13, int level = 0) {
  return detail::x_integral(y, rel_tol, level, [](double x, double yy) {
    const double x32 = x * std::sqrt(x);
    const double den = x32 + yy * std::sqrt(yy);
    return den > 0.0 ? 2.0 * x32 / den : 0.0;
  });
}

/// int_0^inf dx Ai(x) S^{-5/3} Ai'(S^{2/3}), the x integral of the Ai' term.
inline quad::Sample vd_weight(double y, double rel_tol = 1e-13, int level = 0) {
  auto f = [y](double x) {
    const double S = x * std::sqrt(x) + y * std::sqrt(y);
    if (S == 0.0) return 0.0;
    const double S13 = std::cbrt(S);
    return detail::ai(x) * specfun::airy_ai_prime(S13 * S13).value / (S * S13 * S13);
  };
  return quad::to_sample(quad::integrate_1d(f, detail::airy_half_line(0.0, rel_tol), level));
}

// ---------------------------------------------------------------------------
// q0

struct Q0Coefficients {
  // Coefficients of p^n / s^{n+1} for n = 1..4; index 0 unused.
  std::array<double, 5> c{};
  std::array<double, 5> err{};
  bool converged = true;
};

namespace detail {

inline double z_poly_1(double z) { return (z - 1.0) * std::pow(z, -4.0 / 3.0); }
inline double z_poly_2(double z) {
  // d/dz [(z-1)^2 z^{-4/3}]
  return 2.0 * (z - 1.0) * std::pow(z, -4.0 / 3.0) -
         (4.0 / 3.0) * (z - 1.0) * (z - 1.0) * std::pow(z, -7.0 / 3.0);
}
inline double z_poly_3(double z) {
  return (z - 1.0) * (z - 1.0) * (z - 1.0) * std::pow(z, -4.0 / 3.0);
}

// int_0^inf dF F^{-1/6} Ai(s F^{-2/3}) F^{-13/6 - extra} int_1^inf dz P(z) Ai(s F^{-2/3} z^{2/3})
template <class Poly>
quad::QuadratureResult q0_f_integral(const Poly& poly, double s, double extra_power,
                                     double rel_tol) {
  const double inner = inner_rel(rel_tol);
  auto f = [&](double F) -> Sample {
    const double w = s / std::cbrt(F * F);
    const double a = ai(w);
    if (a == 0.0) return Sample{};
    Sample z = z_moment(poly, w, inner, 1);
    return scaled(z, std::pow(F, -7.0 / 3.0 - extra_power) * a);
  };
  quad::QuadratureSpec spec = quad::QuadratureSpec::half_line(
      0.0, quad::DecayHint::algebraic(-5.0 / 3.0), rel_tol, 1e-300);
  spec.max_subdivisions = 10000;
  return quad::integrate_1d(f, spec);
}

}  // namespace detail

// Coefficients of the inhomogeneous term, evaluated as integrals over the
// basis label F at the given s and scaled to the dimensionless c_n.
inline Q0Coefficients q0_coefficients(double s = 1.0, double rel_tol = 1e-11) {
  if (!(s > 0.0)) throw std::domain_error("q0_coefficients: s must be positive");
  Q0Coefficients out;
  out.c[1] = -0.5;
  const quad::QuadratureResult t2 = detail::q0_f_integral(detail::z_poly_1, s, 0.0, rel_tol);
  const quad::QuadratureResult t3 = detail::q0_f_integral(detail::z_poly_2, s, 0.0, rel_tol);
  const quad::QuadratureResult t4 = detail::q0_f_integral(detail::z_poly_3, s, 2.0, rel_tol);
  const double s2 = s * s, s5 = s2 * s2 * s;
  out.c[2] = 0.5 - s2 * t2.value;
  out.err[2] = s2 * t2.err_est;
  out.c[3] = -0.5 + 1.5 * s2 * t3.value;
  out.err[3] = 1.5 * s2 * t3.err_est;
  out.c[4] = 0.5 - 0.5 * s5 * t4.value;
  out.err[4] = 0.5 * s5 * t4.err_est;
  out.converged = t2.converged && t3.converged && t4.converged;
  return out;
}

// Same coefficients after the x integral is done in closed form with
// int_0^inf x Ai(x) Ai(a x) dx = (a-1)/(a^3-1) / (2 pi sqrt 3) and
// int_0^inf x^4 Ai(x) Ai(a x) dx = sqrt 3 / pi (a+1) ((a-1)/(a^3-1))^3,
// leaving one z integral per coefficient.
inline Q0Coefficients q0_closed_integrals(double rel_tol = 1e-13) {
  Q0Coefficients out;
  out.c[1] = -0.5;
  const double k37 = 1.0 / (2.0 * kPi * kSqrt3);
  auto r_of = [](double z) {
    const double a = std::cbrt(z * z);
    return 1.0 / (a * a + a + 1.0);
  };
  quad::QuadratureSpec spec = quad::QuadratureSpec::half_line(
      1.0, quad::DecayHint::algebraic(-5.0 / 3.0), rel_tol, 1e-300);
  spec.max_subdivisions = 10000;
  const quad::QuadratureResult i2 = quad::integrate_1d(
      [&](double z) { return detail::z_poly_1(z) * r_of(z); }, spec);
  const quad::QuadratureResult i3 = quad::integrate_1d(
      [&](double z) { return detail::z_poly_2(z) * r_of(z); }, spec);
  const quad::QuadratureResult i4 = quad::integrate_1d(
      [&](double z) {
        const double r = r_of(z);
        return (std::cbrt(z * z) + 1.0) * r * r * r * detail::z_poly_3(z);
      },
      spec);
  out.c[2] = 0.5 - 1.5 * k37 * i2.value;
  out.err[2] = 1.5 * k37 * i2.err_est;
  out.c[3] = -0.5 + 2.25 * k37 * i3.value;
  out.err[3] = 2.25 * k37 * i3.err_est;
  const double k38 = kSqrt3 / kPi;
  out.c[4] = 0.5 - 0.75 * k38 * i4.value;
  out.err[4] = 0.75 * k38 * i4.err_est;
  out.converged = i2.converged && i3.converged && i4.converged;
  return out;
}

// ---------------------------------------------------------------------------
// q1, q2

// (9/4) int_0^inf dy y^3 Z(y) V(y): the prefactor of p^3/s^4 (and minus that
// of p^4/s^5) from the first iterate.
inline quad::QuadratureResult q1_prefactor(double rel_tol = 1e-11) {
  const double inner = detail::inner_rel(rel_tol);
  auto f = [&](double y) -> quad::Sample {
    if (y <= 0.0) return {};
    const quad::Sample z = z_weight(y, inner, 1);
    const quad::Sample v = v_weight(y, inner, 1);
    return detail::scaled(detail::product(z, v), 2.25 * y * y * y);
  };
  return quad::integrate_1d(f, detail::airy_half_line(0.0, rel_tol));
}

// The same prefactor with the basis label F kept as outer variable at a given s:
//   s^3 int_0^inf dF F^{-3} Ai(x) J(x),  x = s F^{-2/3},
//   J(x) = (3/2) x^{-2} int_0^inf dy y^3 M(x,y) Z(y).
inline quad::QuadratureResult q1_prefactor_at(double s, double rel_tol = 1e-10) {
  if (!(s > 0.0)) throw std::domain_error("q1_prefactor_at: s must be positive");
  const double inner = detail::inner_rel(rel_tol);
  const double inner2 = detail::inner_rel(inner);
  auto f = [&](double F) -> quad::Sample {
    const double x = s / std::cbrt(F * F);
    const double a = detail::ai(x);
    if (a == 0.0) return {};
    auto g = [&](double y) -> quad::Sample {
      if (y <= 0.0) return {};
      return detail::scaled(z_weight(y, inner2, 2), y * y * y * m_weight(x, y));
    };
    const quad::Sample j =
        quad::to_sample(quad::integrate_1d(g, detail::airy_half_line(0.0, inner), 1));
    return detail::scaled(j, 1.5 / (x * x) * a * s * s * s / (F * F * F));
  };
  quad::QuadratureSpec spec = quad::QuadratureSpec::half_line(
      0.0, quad::DecayHint::algebraic(-5.0 / 3.0), rel_tol, 1e-300);
  spec.max_subdivisions = 10000;
  return quad::integrate_1d(f, spec);
}

struct Q2Report {
  quad::QuadratureResult one_piece;  // the "1" term, equal to -q1 prefactor
  quad::QuadratureResult h_piece;    // the 2/(1+h) term
  quad::QuadratureResult g_piece;    // the -2/(1+g) term
  quad::QuadratureResult total;
  double residual = 0.0;  // h_piece + g_piece
  double residual_err = 0.0;
  bool converged() const {
    return one_piece.converged && h_piece.converged && g_piece.converged;
  }
};

// Prefactor of p^4/s^5 from the Airy-derivative part of the first iterate,
// after the derivatives are traded for the three-term weight
// 1 + 2/(1+h) - 2/(1+g). Each term is integrated separately.
inline Q2Report q2_prefactor(double rel_tol = 1e-11,
                             const quad::QuadratureResult* q1 = nullptr) {
  const double inner = detail::inner_rel(rel_tol);
  Q2Report r;
  if (q1 != nullptr) {
    r.one_piece = *q1;
  } else {
    r.one_piece = q1_prefactor(rel_tol);
  }
  r.one_piece.value = -r.one_piece.value;
  auto fh = [&](double y) -> quad::Sample {
    if (y <= 0.0) return {};
    return detail::scaled(detail::product(z_weight(y, inner, 1), vh_weight(y, inner, 1)),
                          -2.25 * y * y * y);
  };
  auto fg = [&](double y) -> quad::Sample {
    if (y <= 0.0) return {};
    return detail::scaled(detail::product(z2_weight(y, inner, 1), v_weight(y, inner, 1)),
                          4.5 * y * y * y);
  };
  r.h_piece = quad::integrate_1d(fh, detail::airy_half_line(0.0, rel_tol));
  r.g_piece = quad::integrate_1d(fg, detail::airy_half_line(0.0, rel_tol));
  r.total = r.one_piece;
  quad::detail::accumulate(r.total, r.h_piece);
  quad::detail::accumulate(r.total, r.g_piece);
  r.residual = r.h_piece.value + r.g_piece.value;
  r.residual_err = r.h_piece.err_est + r.g_piece.err_est;
  return r;
}

// The same prefactor straight from the Ai' form, before integration by parts:
//   (9/4) int_0^inf dy [ y^{9/2} Z(y) Vd(y) + y^4 Z3(y) V(y) ].
inline quad::QuadratureResult q2_derivative_form(double rel_tol = 1e-11) {
  const double inner = detail::inner_rel(rel_tol);
  auto f = [&](double y) -> quad::Sample {
    if (y <= 0.0) return {};
    const quad::Sample a = detail::scaled(
        detail::product(z_weight(y, inner, 1), vd_weight(y, inner, 1)),
        2.25 * y * y * y * y * std::sqrt(y));
    const quad::Sample b = detail::scaled(
        detail::product(z3_weight(y, inner, 1), v_weight(y, inner, 1)),
        2.25 * y * y * y * y);
    return detail::sum(a, b);
  };
  return quad::integrate_1d(f, detail::airy_half_line(0.0, rel_tol));
}

// ---------------------------------------------------------------------------
// eps

struct LevelBudget {
  int level = 0;
  double err = 0.0;
};

struct EpsilonReport {
  quad::QuadratureResult result;
  std::vector<LevelBudget> budget;  // level 0 own error, level 1 inner levels combined
};

/// W(y) = int_0^inf du u^3 M(u,y) Z(u).
inline quad::Sample w_weight(double y, double rel_tol = 1e-13, int level = 0) {
  const double inner = detail::inner_rel(rel_tol);
  auto f = [&](double u) -> quad::Sample {
    if (u <= 0.0) return {};
    return detail::scaled(z_weight(u, inner, level + 1), u * u * u * m_weight(u, y));
  };
  return quad::to_sample(quad::integrate_1d(f, detail::airy_half_line(0.0, rel_tol), level));
}

// eps = (27/8) int_0^inf dy y^2 V(y) W(y), the p^4/s^5 prefactor of the
// first iterate acting on the p^2 part of a_0.
inline EpsilonReport epsilon_constant(double rel_tol = 1e-7) {
  const double inner = detail::inner_rel(rel_tol);
  auto f = [&](double y) -> quad::Sample {
    if (y <= 0.0) return {};
    return detail::scaled(detail::product(v_weight(y, inner, 1), w_weight(y, inner, 1)),
                          3.375 * y * y);
  };
  EpsilonReport r;
  r.result = quad::integrate_1d(f, detail::airy_half_line(0.0, rel_tol));
  r.budget.push_back({0, r.result.err_est - r.result.inner_err});
  r.budget.push_back({1, r.result.inner_err});
  return r;
}

// ---------------------------------------------------------------------------
// assembly

struct Contributions {
  Q0Coefficients q0;
  quad::QuadratureResult q1;
  Q2Report q2;
  EpsilonReport eps;

  bool converged() const {
    return q0.converged && q1.converged && q2.converged() && eps.result.converged;
  }
};

// Runs the four independent contributions, concurrently when `parallel`.
inline Contributions compute_contributions(Tier tier, bool parallel = true) {
  const TierTolerances tol = tolerances(tier);
  const auto policy = parallel ? std::launch::async : std::launch::deferred;
  auto f0 = std::async(policy, [&] { return q0_coefficients(1.0, tol.outer_rel); });
  auto f1 = std::async(policy, [&] {
    const quad::QuadratureResult q1 = q1_prefactor(tol.outer_rel);
    return std::make_pair(q1, q2_prefactor(tol.outer_rel, &q1));
  });
  auto f3 = std::async(policy, [&] { return epsilon_constant(tol.epsilon_rel); });
  Contributions c;
  c.q0 = f0.get();
  auto [q1, q2] = f1.get();
  c.q1 = q1;
  c.q2 = q2;
  c.eps = f3.get();
  return c;
}

struct SeriesTable {
  std::array<double, 6> coeffs{};
  std::array<double, 6> err{};
  std::array<Provenance, 6> provenance{};
  std::vector<std::string> flags;  // disagreements with known closed forms
};

namespace detail {

inline void flag_mismatch(SeriesTable& t, const std::string& what, double value,
                          double err, double exact) {
  if (std::fabs(value - exact) > 10.0 * err + 1e-13) {
    t.flags.push_back(what + ": quadrature " + std::to_string(value) +
                      " differs from closed form " + std::to_string(exact));
  }
}

// c5 from the vanishing fifth central moment.
inline void back_fill_c5(SeriesTable& t) {
  const double raw2 = t.coeffs[2], raw4 = t.coeffs[4];
  t.coeffs[5] = -(2.5 * raw4 - 2.5 * raw2 + 0.5);
  t.err[5] = 2.5 * t.err[4] + 2.5 * t.err[2];
  t.provenance[5] = Provenance::closed_form;
}

}  // namespace detail

inline SeriesTable assemble_series(const Contributions& c) {
  SeriesTable t;
  t.coeffs[0] = 1.0;
  t.coeffs[1] = -0.5;
  t.provenance[0] = t.provenance[1] = Provenance::closed_form;
  t.coeffs[2] = c.q0.c[2];
  t.err[2] = c.q0.err[2];
  t.coeffs[3] = c.q0.c[3] + c.q1.value;
  t.err[3] = c.q0.err[3] + c.q1.err_est;
  t.coeffs[4] = c.q0.c[4] - c.q1.value + c.q2.total.value + c.eps.result.value;
  t.err[4] = c.q0.err[4] + c.q1.err_est + c.q2.total.err_est + c.eps.result.err_est;
  t.provenance[2] = t.provenance[3] = t.provenance[4] = Provenance::quadrature;
  detail::back_fill_c5(t);
  detail::flag_mismatch(t, "c2", c.q0.c[2], c.q0.err[2], closed::c2);
  detail::flag_mismatch(t, "q0 c3", c.q0.c[3], c.q0.err[3], closed::q0_c3);
  detail::flag_mismatch(t, "q0 c4", c.q0.c[4], c.q0.err[4], closed::q0_c4);
  detail::flag_mismatch(t, "q1", c.q1.value, c.q1.err_est, closed::q1_prefactor);
  detail::flag_mismatch(t, "q2", c.q2.total.value, c.q2.total.err_est, closed::q2_prefactor);
  return t;
}

// Table from the closed forms, with eps supplied.
inline SeriesTable assemble_series_closed(double eps, double eps_err = 0.0) {
  SeriesTable t;
  for (int n = 0; n <= 4; ++n) {
    t.coeffs[n] = (n % 2 == 0 ? 1.0 : -1.0) * closed::raw_moment(n, eps);
    t.provenance[n] = Provenance::closed_form;
  }
  t.err[4] = eps_err;
  t.provenance[4] = Provenance::mixed;
  detail::back_fill_c5(t);
  return t;
}

/// Q(t) = sum_n c_n (pt)^n / n!; coefficients of (pt)^n.
struct TimePolynomial {
  std::array<double, 6> coeff{};
  std::array<double, 6> err{};

  double operator()(double pt) const {
    double r = 0.0;
    for (int n = 5; n >= 0; --n) r = r * pt + coeff[n];
    return r;
  }
};

inline TimePolynomial invert_laplace_series(const SeriesTable& table) {
  TimePolynomial poly;
  double factorial = 1.0;
  for (int n = 0; n <= 5; ++n) {
    if (n > 0) factorial *= n;
    poly.coeff[n] = table.coeffs[n] / factorial;
    poly.err[n] = table.err[n] / factorial;
  }
  return poly;
}

struct ConsistencyCheck {
  std::string name;
  double residual = 0.0;
  double tolerance = 0.0;
  bool passed = false;
};

struct MomentTable {
  std::array<double, 6> raw{};  // raw[n] = <T+^n>/t^n, index 0 unused
  std::array<double, 6> raw_err{};
  std::array<Provenance, 6> provenance{};
  double central2 = 0.0, central2_err = 0.0;
  double central4 = 0.0, central4_err = 0.0;
  // Coefficients of (pt)^n/n! in e^{pt/2} Q_p(t) for odd n; all vanish.
  std::array<double, 3> odd_shifted{};
  std::vector<ConsistencyCheck> checks;

  bool consistent() const {
    for (const ConsistencyCheck& c : checks) {
      if (!c.passed) return false;
    }
    return true;
  }
};

namespace detail {

// Coefficient of (pt)^n/n! in e^{pt/2} Q_p(t), and its error bound.
inline std::pair<double, double> shifted_coefficient(const SeriesTable& t, int n) {
  double value = 0.0, err = 0.0, binom = 1.0;
  for (int k = 0; k <= n; ++k) {
    if (k > 0) binom = binom * (n - k + 1) / k;
    const double w = binom * std::pow(0.5, n - k);
    value += w * t.coeffs[k];
    err += w * t.err[k];
  }
  return {value, err};
}

}  // namespace detail

inline MomentTable moments(const SeriesTable& table) {
  MomentTable m;
  for (int n = 1; n <= 5; ++n) {
    const double sign = n % 2 == 0 ? 1.0 : -1.0;
    m.raw[n] = sign * table.coeffs[n];
    m.raw_err[n] = table.err[n];
    m.provenance[n] = table.provenance[n];
  }
  const auto [s2, e2] = detail::shifted_coefficient(table, 2);
  const auto [s4, e4] = detail::shifted_coefficient(table, 4);
  m.central2 = s2;
  m.central2_err = e2;
  m.central4 = s4;
  m.central4_err = e4;
  for (int i = 0; i < 3; ++i) {
    const int n = 2 * i + 1;
    const auto [v, e] = detail::shifted_coefficient(table, n);
    m.odd_shifted[i] = v;
    ConsistencyCheck c;
    c.name = "odd central moment n=" + std::to_string(n);
    c.residual = v;
    c.tolerance = 10.0 * e + 1e-13;
    c.passed = std::fabs(v) <= c.tolerance;
    m.checks.push_back(c);
  }
  for (int n = 1; n < 5; ++n) {
    ConsistencyCheck c;
    c.name = "monotone n=" + std::to_string(n);
    c.residual = m.raw[n + 1] - m.raw[n];
    c.passed = m.raw[n + 1] < m.raw[n] && m.raw[n + 1] > 0.0;
    m.checks.push_back(c);
  }
  return m;
}

// <T+>(x0, v0, t) = t/2 + (1/2) int_0^t du erf( sqrt(3)/2 (x0 + v0 u) / u^{3/2} ).
inline quad::QuadratureResult mean_occupation(double x0, double v0, double t,
                                              double rel_tol = 1e-12) {
  if (!(t > 0.0) || !std::isfinite(t) || !std::isfinite(x0) || !std::isfinite(v0)) {
    throw std::domain_error("mean_occupation: need finite x0, v0 and t > 0");
  }
  auto f = [=](double u) {
    return specfun::erf(0.5 * kSqrt3 * (x0 + v0 * u) / (u * std::sqrt(u)));
  };
  quad::QuadratureResult r = quad::integrate_1d(
      f, quad::QuadratureSpec::finite(0.0, t, rel_tol, 1e-14 * t));
  r.value = 0.5 * t + 0.5 * r.value;
  r.err_est *= 0.5;
  return r;
}

}  // namespace occtime::series
