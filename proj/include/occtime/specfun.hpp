#pragma once

// Special functions used throughout the library: Airy Ai and its first two
// derivatives, the error function, log-gamma / gamma, the modified Bessel
// function I_nu and the hypergeometric function 2F1(1/4, 1; 1/2; z).
//
// Everything here is implemented in terms of elementary functions only, so
// golden values do not depend on the platform's libm special functions.

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

namespace occtime::specfun {

struct EvalResult {
  double value = 0.0;
  double abs_err_est = 0.0;
};

namespace detail {

inline void require_finite(double x, const char* what) {
  if (!std::isfinite(x)) {
    throw std::domain_error(std::string(what) + ": non-finite argument");
  }
}

// Ai(0) and -Ai'(0).
inline constexpr long double kAiryC1 = 0.355028053887817239260063186004183176L;
inline constexpr long double kAiryC2 = 0.258819403792806798405183560189203963L;

struct AiryPair {
  EvalResult ai;
  EvalResult aip;
};

// Maclaurin series Ai(x) = c1 f(x) - c2 g(x), summed in extended precision.
inline AiryPair airy_maclaurin(double xd) {
  const long double x = xd;
  const long double x3 = x * x * x;
  long double f = 1.0L, g = x, fp = 0.0L, gp = 1.0L;
  long double tf = 1.0L, tg = x, tfp = x * x / 2.0L, tgp = 1.0L;
  long double abs_f = 1.0L, abs_g = std::fabs(x), abs_fp = 0.0L, abs_gp = 1.0L;
  fp = tfp;
  abs_fp = std::fabs(tfp);
  constexpr long double tiny = 1e-22L;
  for (int k = 0; k < 400; ++k) {
    const long double k3 = 3.0L * k;
    tf *= x3 / ((k3 + 2.0L) * (k3 + 3.0L));
    tg *= x3 / ((k3 + 3.0L) * (k3 + 4.0L));
    tfp *= x3 / ((k3 + 3.0L) * (k3 + 5.0L));
    tgp *= x3 / ((k3 + 1.0L) * (k3 + 3.0L));
    f += tf;
    g += tg;
    fp += tfp;
    gp += tgp;
    abs_f += std::fabs(tf);
    abs_g += std::fabs(tg);
    abs_fp += std::fabs(tfp);
    abs_gp += std::fabs(tgp);
    const long double biggest =
        std::fmax(std::fmax(std::fabs(tf), std::fabs(tg)),
                  std::fmax(std::fabs(tfp), std::fabs(tgp)));
    if (k > 2 && biggest < tiny * (abs_f + abs_g + abs_fp + abs_gp)) break;
  }
  const long double ai = kAiryC1 * f - kAiryC2 * g;
  const long double aip = kAiryC1 * fp - kAiryC2 * gp;
  constexpr long double ld_eps = std::numeric_limits<long double>::epsilon();
  constexpr double d_eps = std::numeric_limits<double>::epsilon();
  AiryPair out;
  out.ai.value = static_cast<double>(ai);
  out.aip.value = static_cast<double>(aip);
  out.ai.abs_err_est = static_cast<double>(
      8.0L * ld_eps * (kAiryC1 * abs_f + kAiryC2 * abs_g)) +
      0.5 * d_eps * std::fabs(out.ai.value);
  out.aip.abs_err_est = static_cast<double>(
      8.0L * ld_eps * (kAiryC1 * abs_fp + kAiryC2 * abs_gp)) +
      0.5 * d_eps * std::fabs(out.aip.value);
  return out;
}

// K_{1/3}(z) and K_{4/3}(z) scaled by exp(z), via Temme's continued fraction
// (Steed's algorithm). Valid for z > 0; converges quickly once z >~ 1.5.
inline void bessel_k_third_scaled(double z, double& k13, double& k43) {
  constexpr double mu = 1.0 / 3.0;
  const double a1 = 0.25 - mu * mu;
  double b = 2.0 * (1.0 + z);
  double d = 1.0 / b;
  double h = d, delh = d;
  double q1 = 0.0, q2 = 1.0;
  double q = a1, c = a1;
  double a = -a1;
  double s = 1.0 + q * delh;
  int i = 2;
  for (; i < 100000; ++i) {
    a -= 2.0 * (i - 1);
    c = -a * c / i;
    const double qnew = (q1 - b * q2) / a;
    q1 = q2;
    q2 = qnew;
    q += c * qnew;
    b += 2.0;
    d = 1.0 / (b + a * d);
    delh = (b * d - 1.0) * delh;
    h += delh;
    const double dels = q * delh;
    s += dels;
    if (std::fabs(dels / s) < 1e-17) break;
  }
  h *= a1;
  k13 = std::sqrt(std::numbers::pi / (2.0 * z)) / s;
  k43 = k13 * (mu + z + 0.5 - h) / z;
}

inline AiryPair airy_bessel_k(double x) {
  constexpr double eps = std::numeric_limits<double>::epsilon();
  const double sx = std::sqrt(x);
  const double zeta = 2.0 / 3.0 * x * sx;
  AiryPair out;
  const double damp = std::exp(-zeta);
  if (damp == 0.0) {
    out.ai = {0.0, std::numeric_limits<double>::min()};
    out.aip = {0.0, std::numeric_limits<double>::min()};
    return out;
  }
  double k13 = 0.0, k43 = 0.0;
  bessel_k_third_scaled(zeta, k13, k43);
  const double k23 = k43 - 2.0 / (3.0 * zeta) * k13;
  const double inv_pi = std::numbers::inv_pi;
  out.ai.value = inv_pi * sx / std::numbers::sqrt3 * k13 * damp;
  out.aip.value = -inv_pi * x / std::numbers::sqrt3 * k23 * damp;
  out.ai.abs_err_est = 16.0 * eps * std::fabs(out.ai.value);
  out.aip.abs_err_est = 32.0 * eps * std::fabs(out.aip.value);
  return out;
}

// Oscillatory asymptotic expansion of Ai(-r), Ai'(-r) for large r.
inline AiryPair airy_negative_asymptotic(double x) {
  const double r = -x;
  const double zeta = 2.0 / 3.0 * r * std::sqrt(r);
  double p = 0.0, q = 0.0, rr = 0.0, ss = 0.0;
  double u = 1.0;            // u_k
  double zpow = 1.0;         // zeta^{-k}
  double last = 0.0;
  double prev_mag = std::numeric_limits<double>::infinity();
  for (int k = 0; k < 200; ++k) {
    if (k > 0) {
      u *= (6.0 * k - 5.0) * (6.0 * k - 3.0) * (6.0 * k - 1.0) /
           ((2.0 * k - 1.0) * 216.0 * k);
      zpow /= zeta;
    }
    const double v = (k == 0) ? 1.0 : -(6.0 * k + 1.0) / (6.0 * k - 1.0) * u;
    const double tu = u * zpow;
    const double tv = v * zpow;
    const double mag = std::fmax(std::fabs(tu), std::fabs(tv));
    if (mag > prev_mag) break;  // past the smallest term
    prev_mag = mag;
    const double sgn = ((k / 2) % 2 == 0) ? 1.0 : -1.0;
    if (k % 2 == 0) {
      p += sgn * tu;
      rr += sgn * tv;
    } else {
      q += sgn * tu;
      ss += sgn * tv;
    }
    last = mag;
    if (mag < 1e-17) break;
  }
  const double theta = zeta + std::numbers::pi / 4.0;
  const double sn = std::sin(theta);
  const double cs = std::cos(theta);
  const double amp = 1.0 / std::sqrt(std::numbers::pi);
  const double r4 = std::pow(r, 0.25);
  AiryPair out;
  out.ai.value = amp / r4 * (sn * p - cs * q);
  out.aip.value = -amp * r4 * (cs * rr + sn * ss);
  constexpr double eps = std::numeric_limits<double>::epsilon();
  // Phase error grows like eps * zeta.
  out.ai.abs_err_est = amp / r4 * (last + 4.0 * eps * (1.0 + zeta));
  out.aip.abs_err_est = amp * r4 * (last + 4.0 * eps * (1.0 + zeta));
  return out;
}

inline constexpr double kMaclaurinUpper = 2.0;
inline constexpr double kMaclaurinLower = -8.0;

inline AiryPair airy_pair(double x) {
  require_finite(x, "airy_ai");
  if (x > kMaclaurinUpper) return airy_bessel_k(x);
  if (x < kMaclaurinLower) return airy_negative_asymptotic(x);
  return airy_maclaurin(x);
}

}  // namespace detail

/// Airy function Ai(x).
inline EvalResult airy_ai(double x) { return detail::airy_pair(x).ai; }

/// Derivative Ai'(x).
inline EvalResult airy_ai_prime(double x) { return detail::airy_pair(x).aip; }

/// Second derivative, exactly x * Ai(x) by the Airy equation.
inline EvalResult airy_ai_pp(double x) {
  const EvalResult ai = airy_ai(x);
  return {x * ai.value, std::fabs(x) * ai.abs_err_est};
}

/// Error function. Exactly odd: computed on |x| and the sign reapplied.
inline double erf(double x) {
  detail::require_finite(x, "erf");
  const double ax = std::fabs(x);
  double r = 0.0;
  if (ax == 0.0) {
    return x;
  } else if (ax <= 3.0) {
    // erf(x) = 2/sqrt(pi) exp(-x^2) sum_k 2^k x^{2k+1} / (2k+1)!!, all terms > 0.
    const double x2 = ax * ax;
    double term = ax, sum = ax;
    for (int k = 1; k < 500; ++k) {
      term *= 2.0 * x2 / (2.0 * k + 1.0);
      sum += term;
      if (term < 1e-17 * sum) break;
    }
    r = 2.0 * std::numbers::inv_sqrtpi * std::exp(-x2) * sum;
  } else if (ax < 6.5) {
    // erfc by its continued fraction, modified Lentz.
    constexpr double tiny = 1e-300;
    double f = ax, c = ax, d = 0.0;
    for (int k = 1; k < 1000; ++k) {
      const double an = 0.5 * k;
      d = ax + an * d;
      if (d == 0.0) d = tiny;
      c = ax + an / c;
      if (c == 0.0) c = tiny;
      d = 1.0 / d;
      const double delta = c * d;
      f *= delta;
      if (std::fabs(delta - 1.0) < 1e-16) break;
    }
    r = 1.0 - std::numbers::inv_sqrtpi * std::exp(-ax * ax) / f;
  } else {
    r = 1.0;
  }
  return std::signbit(x) ? -r : r;
}

namespace detail {
// Lanczos approximation, g = 607/128, 15 terms.
inline double ln_gamma_positive(double x) {
  static constexpr double c[15] = {
      0.99999999999999709182,     57.156235665862923517,
      -59.597960355475491248,     14.136097974741747174,
      -0.49191381609762019978,    .33994649984811888699e-4,
      .46523628927048575665e-4,   -.98374475304879564677e-4,
      .15808870322491248884e-3,   -.21026444172410488319e-3,
      .21743961811521264320e-3,   -.16431810653676389022e-3,
      .84418223983852743293e-4,   -.26190838401581408670e-4,
      .36899182659531622704e-5};
  constexpr double g = 607.0 / 128.0;
  const double xm = x - 1.0;
  double a = c[0];
  for (int i = 1; i < 15; ++i) a += c[i] / (xm + i);
  const double t = xm + g + 0.5;
  return 0.5 * std::log(2.0 * std::numbers::pi) + (xm + 0.5) * std::log(t) - t +
         std::log(a);
}

inline bool is_nonpositive_integer(double x) {
  return x <= 0.0 && x == std::floor(x);
}
}  // namespace detail

/// ln|Gamma(x)|. Throws std::domain_error at the poles x = 0, -1, -2, ...
inline double ln_gamma(double x) {
  detail::require_finite(x, "ln_gamma");
  if (detail::is_nonpositive_integer(x)) {
    throw std::domain_error("ln_gamma: pole at non-positive integer");
  }
  if (x == 1.0 || x == 2.0) return 0.0;
  if (x >= 0.5) return detail::ln_gamma_positive(x);
  const double s = std::sin(std::numbers::pi * x);
  return std::log(std::numbers::pi / std::fabs(s)) - detail::ln_gamma_positive(1.0 - x);
}

/// Gamma(x) for any non-pole real x.
inline double gamma(double x) {
  detail::require_finite(x, "gamma");
  if (detail::is_nonpositive_integer(x)) {
    throw std::domain_error("gamma: pole at non-positive integer");
  }
  if (x >= 0.5) return std::exp(detail::ln_gamma_positive(x));
  return std::numbers::pi /
         (std::sin(std::numbers::pi * x) * std::exp(detail::ln_gamma_positive(1.0 - x)));
}

/// exp(-x) I_nu(x) for nu > -1, x >= 0.
inline double bessel_i_scaled(double nu, double x) {
  detail::require_finite(nu, "bessel_i");
  detail::require_finite(x, "bessel_i");
  if (nu <= -1.0) throw std::domain_error("bessel_i: order must exceed -1");
  if (x < 0.0) throw std::domain_error("bessel_i: negative argument");
  if (x == 0.0) {
    if (nu == 0.0) return 1.0;
    if (nu > 0.0) return 0.0;
    return std::numeric_limits<double>::infinity();
  }
  if (x <= 40.0) {
    // sum_k (x/2)^{2k+nu} / (k! Gamma(k+nu+1)); all terms positive.
    const double half = 0.5 * x;
    double term = std::exp(nu * std::log(half) - ln_gamma(nu + 1.0) - x);
    double sum = term;
    const double q = half * half;
    for (int k = 1; k < 2000; ++k) {
      term *= q / (k * (k + nu));
      sum += term;
      if (term < 1e-17 * sum) break;
    }
    return sum;
  }
  // Large-argument expansion; the exponentially small companion is ~exp(-2x).
  const double mu = 4.0 * nu * nu;
  double term = 1.0, sum = 1.0;
  double prev = 1.0;
  for (int k = 1; k < 200; ++k) {
    term *= -(mu - (2.0 * k - 1.0) * (2.0 * k - 1.0)) / (k * 8.0 * x);
    if (std::fabs(term) > prev) break;
    prev = std::fabs(term);
    sum += term;
    if (prev < 1e-17) break;
  }
  return sum / std::sqrt(2.0 * std::numbers::pi * x);
}

/// Modified Bessel function of the first kind I_nu(x), nu > -1, x >= 0.
inline double bessel_i(double nu, double x) {
  const double scaled = bessel_i_scaled(nu, x);
  return scaled * std::exp(x);
}

namespace detail {
// Plain Gauss series for 2F1(a, b; c; z), |z| < 1.
inline double hyp2f1_series(double a, double b, double c, double z) {
  double term = 1.0, sum = 1.0;
  for (int k = 0; k < 200000; ++k) {
    term *= (a + k) * (b + k) / ((c + k) * (k + 1.0)) * z;
    sum += term;
    if (std::fabs(term) < 1e-17 * std::fabs(sum)) return sum;
  }
  throw std::domain_error("hyp2f1: series failed to converge");
}
}  // namespace detail

/// 2F1(1/4, 1; 1/2; z) for real z < 1.
inline double hyp2f1_quarter(double z) {
  detail::require_finite(z, "hyp2f1_quarter");
  if (z >= 1.0) throw std::domain_error("hyp2f1_quarter: requires z < 1");
  constexpr double a = 0.25, b = 1.0, c = 0.5;
  if (z >= 0.0) return detail::hyp2f1_series(a, b, c, z);
  if (z >= -1.0) {
    // Pfaff: (1-z)^{-b} 2F1(c-a, b; c; z/(z-1)), argument in [0, 1/2].
    return detail::hyp2f1_series(c - a, b, c, z / (z - 1.0)) / (1.0 - z);
  }
  // z < -1: continuation to 1/z (a - b = -3/4 is not an integer).
  const double u = 1.0 / z;
  const double mz = -z;
  // First branch: 2F1(1/4, 3/4; 1/4; u) = (1-u)^{-3/4}.
  const double coef1 = gamma(c) * gamma(b - a) / (gamma(b) * gamma(c - a));
  const double branch1 = coef1 * std::pow(mz, -a) * std::pow(1.0 - u, -0.75);
  // Second branch: 2F1(1, 3/2; 7/4; u), with Pfaff to keep the argument in (0, 1/2].
  const double coef2 = gamma(c) * gamma(a - b) / (gamma(a) * gamma(c - b));
  const double f2 =
      detail::hyp2f1_series(1.0, 0.25, 1.75, u / (u - 1.0)) / (1.0 - u);
  const double branch2 = coef2 / mz * f2;
  return branch1 + branch2;
}

}  // namespace occtime::specfun
