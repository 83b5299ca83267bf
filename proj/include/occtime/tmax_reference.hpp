#pragma once

// Closed-form statistics of T_m, the time at which a randomly accelerated
// particle started at rest at the origin reaches its maximum position.

#include <array>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <stdexcept>

#include "occtime/quadrature.hpp"
#include "occtime/specfun.hpp"

namespace occtime::tmax {

struct Rational {
  std::int64_t num = 0;
  std::int64_t den = 1;
  double value() const { return static_cast<double>(num) / static_cast<double>(den); }
};

/// <T_m^n>/t^n = Gamma(1/2) Gamma(1/4+n) / (Gamma(1/2+n) Gamma(1/4)).
inline double tm_moment(int n) {
  if (n < 0) throw std::domain_error("tm_moment: order must be >= 0");
  using specfun::ln_gamma;
  return std::exp(ln_gamma(0.5) + ln_gamma(0.25 + n) - ln_gamma(0.5 + n) - ln_gamma(0.25));
}

/// Exact value prod_{k<n} (4k+1) / (2 (2k+1)); int64 holds it for n <= 12.
inline Rational tm_moment_exact(int n) {
  if (n < 0 || n > 12) throw std::domain_error("tm_moment_exact: order must be in 0..12");
  Rational r{1, 1};
  for (int k = 0; k < n; ++k) {
    r.num *= 4 * k + 1;
    r.den *= 2 * (2 * k + 1);
    const std::int64_t g = std::gcd(r.num, r.den);
    r.num /= g;
    r.den /= g;
  }
  return r;
}

/// <(T_m - t/2)^n>/t^n for even n.
inline double tm_central_moment(int n) {
  if (n < 0 || n % 2 != 0) throw std::domain_error("tm_central_moment: order must be even");
  using specfun::ln_gamma;
  const double log_value = (0.5 - n) * std::log(2.0) + ln_gamma(0.5) + ln_gamma(0.5 + 0.5 * n) -
                           ln_gamma(0.25) - ln_gamma(0.75 + 0.5 * n);
  return std::exp(log_value);
}

/// Central moment from the raw moments by binomial expansion about 1/2.
inline double tm_central_from_raw(int n) {
  if (n < 0) throw std::domain_error("tm_central_from_raw: order must be >= 0");
  double sum = 0.0, binom = 1.0;
  for (int k = 0; k <= n; ++k) {
    if (k > 0) binom = binom * (n - k + 1) / k;
    sum += binom * tm_moment(k) * std::pow(-0.5, n - k);
  }
  return sum;
}

struct TmaxTable {
  std::array<double, 6> raw{};
  std::array<double, 6> central{};  // odd entries are zero
};

inline TmaxTable tm_table() {
  TmaxTable t;
  for (int n = 0; n <= 5; ++n) {
    t.raw[n] = tm_moment(n);
    t.central[n] = n % 2 == 0 ? tm_central_moment(n) : 0.0;
  }
  return t;
}

/// Q_p(t) = 2^{-1/2} Gamma(3/4) (pt)^{1/4} e^{-pt/2} I_{-1/4}(pt/2).
inline double tm_generating_function(double p, double t) {
  if (!(p >= 0.0) || !(t > 0.0)) {
    throw std::domain_error("tm_generating_function: need p >= 0 and t > 0");
  }
  const double z = 0.5 * p * t;
  if (z == 0.0) return 1.0;
  return std::sqrt(0.5) * specfun::gamma(0.75) * std::pow(p * t, 0.25) *
         specfun::bessel_i_scaled(-0.25, z);
}

/// Laplace transform in t: s^{-1} 2F1(1/4, 1; 1/2; -p/s).
inline double tm_generating_function_laplace(double p, double s) {
  if (!(p >= 0.0) || !(s > 0.0)) {
    throw std::domain_error("tm_generating_function_laplace: need p >= 0 and s > 0");
  }
  return specfun::hyp2f1_quarter(-p / s) / s;
}

/// int_0^inf e^{-st} Q_p(t) dt by quadrature.
inline quad::QuadratureResult tm_laplace_by_quadrature(double p, double s,
                                                       double rel_tol = 1e-12) {
  auto f = [=](double t) { return t > 0.0 ? std::exp(-s * t) * tm_generating_function(p, t) : 1.0; };
  quad::QuadratureSpec spec =
      quad::QuadratureSpec::half_line(0.0, quad::DecayHint::none(), rel_tol, 1e-15);
  spec.max_subdivisions = 10000;
  return quad::integrate_1d(f, spec);
}

}  // namespace occtime::tmax
