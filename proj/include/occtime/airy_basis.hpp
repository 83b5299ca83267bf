#pragma once

// Airy basis functions psi_{s,F}(+-v) = F^{-1/6} Ai(+-F^{1/3} v + F^{-2/3} s) on
// the velocity axis, and executable checks of the identities they satisfy:
// the cross-orthogonality, delta-normalisation and closure (in weak form), and
// the expansion of the constant 1/s.

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "occtime/quadrature.hpp"
#include "occtime/specfun.hpp"

namespace occtime::basis {

struct BasisPoint {
  double s = 1.0;
  double F = 1.0;
  double v = 0.0;
  int sign = +1;  // +1 selects psi(+v), -1 selects psi(-v)

  void validate() const {
    if (!(s > 0.0) || !(F > 0.0)) {
      throw std::domain_error("BasisPoint: s and F must be positive");
    }
    if (!std::isfinite(v) || !std::isfinite(s) || !std::isfinite(F)) {
      throw std::domain_error("BasisPoint: non-finite component");
    }
    if (sign != 1 && sign != -1) throw std::domain_error("BasisPoint: sign must be +-1");
  }

  double airy_argument() const {
    return sign * std::cbrt(F) * v + s / std::cbrt(F * F);
  }
};

inline double psi(const BasisPoint& p) {
  p.validate();
  return std::pow(p.F, -1.0 / 6.0) * specfun::airy_ai(p.airy_argument()).value;
}

/// d psi / dv.
inline double psi_dv(const BasisPoint& p) {
  p.validate();
  return p.sign * std::pow(p.F, 1.0 / 6.0) *
         specfun::airy_ai_prime(p.airy_argument()).value;
}

/// d^2 psi / dv^2 through Ai'' = xi Ai.
inline double psi_dvv(const BasisPoint& p) {
  p.validate();
  return std::pow(p.F, 1.0 / 2.0) * specfun::airy_ai_pp(p.airy_argument()).value;
}

/// Airy argument beyond which Ai < tol (relative to Ai(0)).
inline double airy_negligible_argument(double tol) {
  return std::pow(1.5 * -std::log(tol), 2.0 / 3.0);
}

// Integral over the whole v axis of v^weight_power psi_{s1,F}(-v) psi_{s2,G}(v).
// Split at v = 0; each half is truncated where its decaying factor is negligible.
inline quad::QuadratureResult overlap(double s1, double F, double s2, double G,
                                      int weight_power, double abs_tol = 1e-14,
                                      double rel_tol = 1e-12) {
  if (!(s1 > 0.0) || !(s2 > 0.0) || !(F > 0.0) || !(G > 0.0)) {
    throw std::domain_error("overlap: parameters must be positive");
  }
  const double f3 = std::cbrt(F), g3 = std::cbrt(G);
  const double x_cut = airy_negligible_argument(1e-3 * abs_tol);
  const double v_hi = std::max(0.0, (x_cut - s2 / (g3 * g3)) / g3) + 1.0;
  const double v_lo = -(std::max(0.0, (x_cut - s1 / (f3 * f3)) / f3) + 1.0);
  const double pref = std::pow(F * G, -1.0 / 6.0);
  auto integrand = [=](double v) {
    const double a = specfun::airy_ai(-f3 * v + s1 / (f3 * f3)).value;
    const double b = specfun::airy_ai(g3 * v + s2 / (g3 * g3)).value;
    return (weight_power == 1 ? v : 1.0) * pref * a * b;
  };
  auto spec = [&](double lo, double hi) {
    quad::QuadratureSpec sp = quad::QuadratureSpec::finite(lo, hi, rel_tol, 0.5 * abs_tol);
    sp.max_subdivisions = 20000;
    return sp;
  };
  quad::QuadratureResult lower = quad::integrate_1d(integrand, spec(v_lo, 0.0));
  const quad::QuadratureResult upper = quad::integrate_1d(integrand, spec(0.0, v_hi));
  quad::detail::accumulate(lower, upper);
  return lower;
}

struct OrthonormalityReport {
  quad::QuadratureResult cross;  // int v psi_{s,F}(-v) psi_{s,G}(v) dv, expected 0
  double tol = 0.0;
  bool passed = false;
};

inline OrthonormalityReport check_orthonormality(double s, double F, double G, double tol) {
  OrthonormalityReport r;
  r.cross = overlap(s, F, s, G, 1, 1e-2 * tol);
  r.tol = tol;
  r.passed = r.cross.converged && std::fabs(r.cross.value) <= tol;
  return r;
}

inline double gaussian_density(double x, double center, double width) {
  const double u = (x - center) / width;
  return std::exp(-0.5 * u * u) / (width * std::sqrt(2.0 * std::numbers::pi));
}

// Weak form of the delta normalisation:
//   int dG phi(G) int dv v psi_{s,F}(-v) psi_{s,G}(-v)  ->  phi(F)
// for a Gaussian bump phi of the given width around `center`. The G integral
// is taken inside, which makes the v integral absolutely convergent.
inline quad::QuadratureResult smeared_delta(double s, double F, double center,
                                            double width, double abs_tol = 1e-9) {
  if (!(center - 8.0 * width > 0.0)) {
    throw std::domain_error("smeared_delta: bump must lie on G > 0");
  }
  const double g_lo = std::max(center - 10.0 * width, 1e-3 * center);
  const double g_hi = center + 10.0 * width;
  const double f3 = std::cbrt(F);
  const double x_cut = airy_negligible_argument(1e-3 * abs_tol);
  const double v_lo = -(std::max(0.0, (x_cut - s / (f3 * f3)) / f3) + 1.0);
  // Phase mixing across the bump damps the G integral like
  // exp(-(sigma v^{3/2} / (3 sqrt G))^2 / 2) for large v.
  const double v_hi = std::pow(3.0 * 8.5 * std::sqrt(center + 3.0 * width) / width, 2.0 / 3.0);
  auto f = [=](const std::array<double, 2>& p) {
    const double v = p[0], G = p[1];
    const double g3 = std::cbrt(G);
    const double a = specfun::airy_ai(-f3 * v + s / (f3 * f3)).value;
    const double b = specfun::airy_ai(-g3 * v + s / (g3 * g3)).value;
    return v * std::pow(F * G, -1.0 / 6.0) * a * b * gaussian_density(G, center, width);
  };
  std::array<quad::QuadratureSpec, 2> specs = {
      quad::QuadratureSpec::finite(v_lo, v_hi, 1e-9, abs_tol),
      quad::QuadratureSpec::finite(g_lo, g_hi, 1e-11, 1e-3 * abs_tol)};
  specs[0].max_subdivisions = 20000;
  specs[1].max_subdivisions = 20000;
  return quad::integrate_nested<2>(f, specs);
}

// Weak form of the closure relation: for a Gaussian test function
// f(v') = exp(-(v'-center)^2 / (2 width^2)),
//   int dF [psi_F(-v) Phi_-(F) - psi_F(v) Phi_+(F)] = f(v),
//   Phi_-+(F) = int dv' v' f(v') psi_F(-+v').
// `center` should sit several widths away from v' = 0.
inline quad::QuadratureResult closure_smeared(double s, double v, double center,
                                              double width, double abs_tol = 1e-6) {
  if (!(center > 0.0) || !(width > 0.0)) {
    throw std::domain_error("closure_smeared: need center > 0 and width > 0");
  }
  // Gaussian damping of the v' integral once F^{1/2} sqrt(center) width >~ 9.
  const double f_max = 81.0 / (center * width * width);
  const double vp_lo = center - 10.0 * width;
  const double vp_hi = center + 10.0 * width;
  auto f = [=](const std::array<double, 2>& p) {
    const double F = p[0], vp = p[1];
    const double f3 = std::cbrt(F);
    const double shift = s / (f3 * f3);
    const double u = (vp - center) / width;
    const double test = std::exp(-0.5 * u * u);
    const double minus = specfun::airy_ai(-f3 * v + shift).value *
                         specfun::airy_ai(-f3 * vp + shift).value;
    const double plus = specfun::airy_ai(f3 * v + shift).value *
                        specfun::airy_ai(f3 * vp + shift).value;
    return vp * test * std::pow(F, -1.0 / 3.0) * (minus - plus);
  };
  std::array<quad::QuadratureSpec, 2> specs = {
      quad::QuadratureSpec::finite(0.0, f_max, 1e-8, abs_tol),
      quad::QuadratureSpec::finite(vp_lo, vp_hi, 1e-10, 1e-3 * abs_tol)};
  specs[0].max_subdivisions = 20000;
  specs[1].max_subdivisions = 20000;
  return quad::integrate_nested<2>(f, specs);
}

namespace detail {

// Positive root w of w^3 - z w - c = 0 (c > 0); then x = w^2 solves x - c/sqrt(x) = z.
inline double invert_shifted_argument(double z, double c) {
  double w = std::cbrt(c) + std::sqrt(std::max(z, 0.0));
  for (int i = 0; i < 200; ++i) {
    const double f = w * w * w - z * w - c;
    const double fp = 3.0 * w * w - z;
    const double step = f / fp;
    w -= step;
    if (std::fabs(step) <= 1e-16 * w) break;
  }
  return w * w;
}

}  // namespace detail

/// Closed form of int_0^inf dF F^{-3/2} psi_{s,F}(-v).
inline double exact_half_integral(double s, double v) {
  if (!(s > 0.0)) throw std::domain_error("exact_half_integral: s must be positive");
  const double decay = std::exp(-std::sqrt(3.0 * s) * std::fabs(v));
  if (v > 0.0) return (2.0 - decay) / (2.0 * s);
  if (v < 0.0) return decay / (2.0 * s);
  return 1.0 / (2.0 * s);
}

// int_0^inf dF F^{-3/2} psi_{s,F}(-v) by quadrature. With x = s F^{-2/3} it
// becomes (3/(2s)) int_0^inf Ai(x - c / sqrt(x)) dx, c = v sqrt(s). For c > 0
// the integrand oscillates without bound as x -> 0; there the Airy argument
// z = x - c/sqrt(x) is used as integration variable and the oscillatory part
// is summed zero-to-zero with the last half-panel averaged out.
inline quad::QuadratureResult half_integral_quadrature(double s, double v, double abs_tol = 1e-11) {
  if (!(s > 0.0)) throw std::domain_error("half_integral: s must be positive");
  const double c = v * std::sqrt(s);
  const double scale = 1.5 / s;
  quad::QuadratureResult out;
  if (c <= 0.0) {
    auto f = [=](double x) {
      const double arg = x - c / std::sqrt(x);
      return specfun::airy_ai(arg).value;
    };
    out = quad::integrate_1d(
        f, quad::QuadratureSpec::half_line(0.0, quad::DecayHint::airy(), 1e-12,
                                           0.1 * abs_tol / scale));
  } else {
    auto f = [=](double z) {
      const double x = detail::invert_shifted_argument(z, c);
      const double x32 = x * std::sqrt(x);
      return specfun::airy_ai(z).value * 2.0 * x32 / (2.0 * x32 + c);
    };
    const double tol = 0.1 * abs_tol / scale;
    out = quad::integrate_1d(
        f, quad::QuadratureSpec::half_line(0.0, quad::DecayHint::airy(), 1e-12, tol));
    double right = 0.0;
    double last = 0.0;
    for (int k = 1; k < 2000000; ++k) {
      const double left =
          -std::pow(3.0 * std::numbers::pi * (4.0 * k - 1.0) / 8.0, 2.0 / 3.0);
      const quad::QuadratureResult panel =
          quad::integrate_1d(f, quad::QuadratureSpec::finite(left, right, 1e-12, 0.01 * tol));
      quad::detail::accumulate(out, panel);
      last = panel.value;
      right = left;
      if (k > 4 && std::fabs(panel.value) < tol) break;
    }
    out.value -= 0.5 * last;
    out.err_est += 0.5 * std::fabs(last);
  }
  out.value *= scale;
  out.err_est *= scale;
  out.converged = out.converged && out.err_est <= abs_tol;
  return out;
}

/// int_0^inf dF F^{-3/2} [psi_{s,F}(-v) + psi_{s,F}(v)], which equals 1/s.
inline quad::QuadratureResult identity_one_over_s(double s, double v, double abs_tol = 1e-11) {
  quad::QuadratureResult a = half_integral_quadrature(s, v, 0.5 * abs_tol);
  const quad::QuadratureResult b = half_integral_quadrature(s, -v, 0.5 * abs_tol);
  quad::detail::accumulate(a, b);
  return a;
}

}  // namespace occtime::basis
