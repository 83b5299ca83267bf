#pragma once

// Executable identity checks grouped into suites. Each check records what was
// measured, what was expected and the tolerance it was held to.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "occtime/airy_basis.hpp"
#include "occtime/kernel.hpp"
#include "occtime/mc_simulator.hpp"
#include "occtime/perturbation.hpp"
#include "occtime/tmax_reference.hpp"

namespace occtime::validation {

struct Check {
  std::string suite;
  std::string name;
  double measured = 0.0;
  double expected = 0.0;
  double tolerance = 0.0;
  bool converged = true;
  bool passed = false;
};

inline Check make_check(std::string suite, std::string name, double measured, double expected,
                        double tolerance, bool converged = true) {
  Check c{std::move(suite), std::move(name), measured, expected, tolerance, converged, false};
  c.passed = converged && std::isfinite(measured) && std::fabs(measured - expected) <= tolerance;
  return c;
}

inline bool all_passed(const std::vector<Check>& checks) {
  return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.passed; });
}

inline bool all_converged(const std::vector<Check>& checks) {
  return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.converged; });
}

inline std::string fmt(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", x);
  return buf;
}

// ---------------------------------------------------------------------------

inline std::vector<Check> basis_suite() {
  const std::string suite = "basis";
  std::vector<Check> out;

  out.push_back(make_check(suite, "psi s=1 F=1 v=0", basis::psi({1.0, 1.0, 0.0, +1}),
                           0.1352924163128814, 1e-13));
  out.push_back(make_check(suite, "psi s=1 F=8 v=0", basis::psi({1.0, 8.0, 0.0, -1}),
                           std::pow(8.0, -1.0 / 6.0) * specfun::airy_ai(0.25).value, 1e-15));
  {
    // Second derivative by central differences against the Airy equation.
    const basis::BasisPoint p{1.0, 2.0, 0.7, +1};
    const double h = 1e-4;
    basis::BasisPoint lo = p, hi = p;
    lo.v -= h;
    hi.v += h;
    const double fd = (basis::psi(hi) - 2.0 * basis::psi(p) + basis::psi(lo)) / (h * h);
    const double residual = (p.s + p.sign * p.F * p.v) * basis::psi(p) - fd;
    out.push_back(make_check(suite, "psi Airy equation s=1 F=2 v=0.7", residual, 0.0, 1e-6));
  }

  const std::pair<double, double> cross_pairs[] = {{1.0, 2.0}, {1.5, 1.5}, {0.7, 2.5}, {3.0, 0.5}};
  for (auto [F, G] : cross_pairs) {
    const basis::OrthonormalityReport r = basis::check_orthonormality(1.0, F, G, 1e-8);
    out.push_back(make_check(suite, "cross orthogonality F=" + fmt(F) + " G=" + fmt(G),
                             r.cross.value, 0.0, 1e-8, r.cross.converged));
  }

  for (double F : {0.85, 1.0, 1.12}) {
    const quad::QuadratureResult d = basis::smeared_delta(1.0, F, 1.0, 0.1);
    out.push_back(make_check(suite, "smeared delta F=" + fmt(F), d.value,
                             basis::gaussian_density(F, 1.0, 0.1), 1e-6, d.converged));
  }

  for (double v : {0.7, 0.85, 1.0, 1.15, 1.3}) {
    const quad::QuadratureResult c = basis::closure_smeared(1.0, v, 1.0, 0.15);
    const double u = (v - 1.0) / 0.15;
    out.push_back(make_check(suite, "closure v=" + fmt(v), c.value, std::exp(-0.5 * u * u),
                             1e-4, c.err_est <= 1e-4));
  }

  const std::pair<double, double> identity_points[] = {
      {1.0, 0.0}, {2.0, 1.3}, {1.0, -4.0}, {0.5, 0.3}, {0.5, -2.0},
      {1.0, 1.0}, {1.5, -0.6}, {3.0, 2.2}, {0.8, 5.0}, {2.5, -0.1}};
  for (auto [s, v] : identity_points) {
    const quad::QuadratureResult r = basis::identity_one_over_s(s, v);
    out.push_back(make_check(suite, "identity 1/s s=" + fmt(s) + " v=" + fmt(v), r.value,
                             1.0 / s, 1e-8, r.converged));
  }

  const std::pair<double, double> half_points[] = {
      {1.0, -1.0}, {1.0, 1e-9}, {1.0, -1e-9}, {2.0, 0.8}, {0.5, -1.7}, {1.0, 3.0}};
  for (auto [s, v] : half_points) {
    const quad::QuadratureResult r = basis::half_integral_quadrature(s, v);
    out.push_back(make_check(suite, "half integral s=" + fmt(s) + " v=" + fmt(v), r.value,
                             basis::exact_half_integral(s, v), 1e-8, r.converged));
  }

  {
    double worst = 0.0;
    std::mt19937_64 gen(11);
    std::uniform_real_distribution<double> u(0.2, 3.0), uv(-3.0, 3.0);
    for (int i = 0; i < 100; ++i) {
      const double s = u(gen), F = u(gen), v = uv(gen), lam = u(gen);
      for (int sign : {-1, +1}) {
        const double a = basis::psi({std::pow(lam, 2.0 / 3.0) * s, lam * F,
                                     std::pow(lam, -1.0 / 3.0) * v, sign});
        const double b = std::pow(lam, -1.0 / 6.0) * basis::psi({s, F, v, sign});
        worst = std::max(worst, std::fabs(a - b) / std::max(std::fabs(b), 1e-300));
      }
    }
    out.push_back(make_check(suite, "psi scale covariance (max rel)", worst, 0.0, 1e-12));
  }
  return out;
}

// ---------------------------------------------------------------------------

inline std::vector<Check> kernel_suite() {
  const std::string suite = "kernel";
  std::vector<Check> out;
  std::mt19937_64 gen(23);
  std::uniform_real_distribution<double> uF(0.5, 3.0), us(0.5, 2.0), up(0.1, 2.0);

  double worst = 0.0;
  bool converged = true;
  for (int i = 0; i < 50; ++i) {
    const kernel::KernelParams k{us(gen), up(gen), uF(gen), uF(gen)};
    const double closed = kernel::k_closed(k);
    const kernel::KernelOracle o = kernel::k_oracle(k);
    converged = converged && o.converged();
    worst = std::max({worst, std::fabs(o.weighted.value / closed - 1.0),
                      std::fabs(o.reduced.value / closed - 1.0)});
  }
  out.push_back(make_check(suite, "kernel oracle match 50 pts (max rel)", worst, 0.0, 1e-8,
                           converged));

  {
    const kernel::KernelParams k{1.0, 0.0, 1.0, 2.0};
    const kernel::KernelOracle o = kernel::k_oracle(k);
    out.push_back(make_check(suite, "k at p=0 (oracle)", o.weighted.value, 0.0, 1e-10,
                             o.converged()));
    out.push_back(make_check(suite, "k at p=0 (closed)", kernel::k_closed(k), 0.0, 0.0));
  }
  {
    const kernel::KernelParams k{1.0, 1.0, 1.0, 1.0};
    out.push_back(make_check(suite, "k s=1 p=1 F=G=1", kernel::k_closed(k),
                             -std::pow(2.0, -4.0 / 3.0) *
                                 specfun::airy_ai(3.0 * std::pow(2.0, -1.0 / 3.0)).value,
                             1e-16));
  }
  {
    const kernel::KernelParams k{1.0, 0.5, 1.0, 2.0};
    const kernel::KernelParams swapped{1.5, -0.5, 2.0, 1.0};
    const double expect = -kernel::k_closed(k);
    out.push_back(make_check(suite, "s<->s+p swap (closed)", kernel::k_closed(swapped), expect,
                             1e-15));
    const kernel::KernelOracle o = kernel::k_oracle(swapped);
    out.push_back(make_check(suite, "s<->s+p swap (oracle)", o.weighted.value, expect, 1e-12,
                             o.converged()));
  }
  {
    double worst = 0.0;
    std::mt19937_64 g2(5);
    std::uniform_real_distribution<double> u(0.3, 3.0);
    for (int i = 0; i < 50; ++i) {
      const kernel::KernelParams k{u(g2), u(g2), u(g2), u(g2)};
      const double lam = u(g2);
      const double l23 = std::pow(lam, 2.0 / 3.0);
      const kernel::KernelParams ks{l23 * k.s, l23 * k.p, lam * k.F, lam * k.G};
      const double ratio = kernel::k_closed(ks) / (kernel::k_closed(k) / lam);
      worst = std::max(worst, std::fabs(ratio - 1.0));
    }
    out.push_back(make_check(suite, "k scale covariance lambda^-1 (max rel)", worst, 0.0, 1e-12));
  }

  double worst_sym = 0.0;
  bool sym_conv = true, sign_ok = true;
  for (int i = 0; i < 20; ++i) {
    const double s = us(gen), p = up(gen), F = uF(gen), G = uF(gen);
    const quad::QuadratureResult a = kernel::K_fredholm(s, p, F, G);
    const quad::QuadratureResult b = kernel::K_fredholm(s, p, G, F);
    sym_conv = sym_conv && a.converged && b.converged;
    sign_ok = sign_ok && a.value <= 0.0;
    worst_sym = std::max(worst_sym, std::fabs(a.value - b.value));
  }
  out.push_back(make_check(suite, "K symmetry 20 pts (max abs)", worst_sym, 0.0, 1e-10, sym_conv));
  out.push_back(make_check(suite, "K sign <= 0", sign_ok ? 0.0 : 1.0, 0.0, 0.0));

  {
    const double k2 = kernel::K_fredholm(1.0, 1e-2, 1.0, 2.0).value / 1e-4;
    const double k3 = kernel::K_fredholm(1.0, 1e-3, 1.0, 2.0).value / 1e-6;
    const double k4 = kernel::K_fredholm(1.0, 1e-4, 1.0, 2.0).value / 1e-8;
    // K/p^2 = K2 + K3 p + ..., so successive differences shrink tenfold.
    out.push_back(make_check(suite, "K/p^2 limit difference ratio", (k3 - k2) / (k4 - k3) / 10.0,
                             1.0, 0.02));
  }
  {
    // Tail soundness of the H integral: split at H = 50 and compare.
    const double s = 1.0, p = 0.7, F = 1.2, G = 2.1;
    auto f = [&](double H) {
      return H > 0.0 ? -kernel::k_closed({s, p, F, H}) * kernel::k_closed({s, p, G, H}) : 0.0;
    };
    quad::QuadratureResult head =
        quad::integrate_1d(f, quad::QuadratureSpec::finite(0.0, 50.0, 1e-13, 1e-300));
    const quad::QuadratureResult tail = quad::integrate_1d(
        f, quad::QuadratureSpec::half_line(50.0, quad::DecayHint::algebraic(-3.0), 1e-13, 1e-300));
    quad::detail::accumulate(head, tail);
    const quad::QuadratureResult whole = kernel::K_fredholm(s, p, F, G);
    out.push_back(make_check(suite, "K interval additivity at H=50", whole.value, head.value,
                             1e-14, whole.converged && head.converged));
  }
  return out;
}

// ---------------------------------------------------------------------------

struct SeriesArtifacts {
  series::Contributions contributions;
  series::SeriesTable table;
  series::MomentTable moments;
  series::SeriesTable closed_table;
  series::MomentTable closed_moments;
  series::Q0Coefficients q0_closed_route;
  series::Q0Coefficients q0_s2;
  quad::QuadratureResult q1_s1;
  quad::QuadratureResult q1_s2;
  quad::QuadratureResult q2_derivative;
};

inline SeriesArtifacts compute_series_artifacts(series::Tier tier) {
  SeriesArtifacts a;
  a.contributions = series::compute_contributions(tier);
  a.table = series::assemble_series(a.contributions);
  a.moments = series::moments(a.table);
  a.closed_table = series::assemble_series_closed(a.contributions.eps.result.value,
                                                  a.contributions.eps.result.err_est);
  a.closed_moments = series::moments(a.closed_table);
  a.q0_closed_route = series::q0_closed_integrals();
  a.q0_s2 = series::q0_coefficients(2.0, series::tolerances(tier).outer_rel);
  a.q1_s1 = series::q1_prefactor_at(1.0, 1e-9);
  a.q1_s2 = series::q1_prefactor_at(2.0, 1e-9);
  a.q2_derivative = series::q2_derivative_form(series::tolerances(tier).outer_rel);
  return a;
}

// Closed-form integrals of Airy products used throughout.
inline std::vector<Check> airy_integral_checks(const std::string& suite) {
  std::vector<Check> out;
  const double k37 = 1.0 / (2.0 * std::numbers::pi * std::sqrt(3.0));
  const quad::QuadratureSpec half = quad::QuadratureSpec::half_line(
      0.0, quad::DecayHint::airy(), 1e-13, 1e-300);
  const quad::QuadratureResult i1 =
      quad::integrate_1d([](double x) { return specfun::airy_ai(x).value; }, half);
  out.push_back(make_check(suite, "int Ai = 1/3", i1.value, 1.0 / 3.0, 1e-9, i1.converged));
  for (double a : {2.0, 0.5, 3.0}) {
    const quad::QuadratureResult i2 = quad::integrate_1d(
        [a](double x) { return x * specfun::airy_ai(x).value * specfun::airy_ai(a * x).value; },
        half);
    out.push_back(make_check(suite, "int x Ai(x) Ai(ax), a=" + fmt(a), i2.value,
                             k37 * (a - 1.0) / (a * a * a - 1.0), 1e-9, i2.converged));
    const quad::QuadratureResult i3 = quad::integrate_1d(
        [a](double x) {
          return x * x * x * x * specfun::airy_ai(x).value * specfun::airy_ai(a * x).value;
        },
        half);
    const double r = (a - 1.0) / (a * a * a - 1.0);
    out.push_back(make_check(suite, "int x^4 Ai(x) Ai(ax), a=" + fmt(a), i3.value,
                             std::sqrt(3.0) / std::numbers::pi * (a + 1.0) * r * r * r, 1e-9,
                             i3.converged));
  }
  return out;
}

inline std::vector<Check> series_suite(const SeriesArtifacts& a) {
  const std::string suite = "series";
  std::vector<Check> out = airy_integral_checks(suite);
  const series::Contributions& c = a.contributions;
  using namespace series;

  out.push_back(make_check(suite, "c2 (q0 quadrature)", c.q0.c[2], closed::c2, 1e-8,
                           c.q0.converged));
  out.push_back(make_check(suite, "q0 c3", c.q0.c[3], closed::q0_c3, 1e-9, c.q0.converged));
  out.push_back(make_check(suite, "q0 c4", c.q0.c[4], closed::q0_c4, 1e-9, c.q0.converged));
  for (int n = 2; n <= 4; ++n) {
    out.push_back(make_check(suite, "q0 c" + std::to_string(n) + " closed-integral route",
                             a.q0_closed_route.c[n], c.q0.c[n], 1e-9, a.q0_closed_route.converged));
    out.push_back(make_check(suite, "q0 c" + std::to_string(n) + " s=2 vs s=1", a.q0_s2.c[n],
                             c.q0.c[n], 1e-8, a.q0_s2.converged));
  }
  out.push_back(make_check(suite, "q1 prefactor", c.q1.value, closed::q1_prefactor, 1e-8,
                           c.q1.converged));
  out.push_back(make_check(suite, "q1 prefactor F-route s=1", a.q1_s1.value, c.q1.value, 1e-8,
                           a.q1_s1.converged));
  out.push_back(make_check(suite, "q1 prefactor s=2 vs s=1", a.q1_s2.value, a.q1_s1.value, 1e-8,
                           a.q1_s2.converged));
  out.push_back(make_check(suite, "q2 total", c.q2.total.value, closed::q2_prefactor, 1e-8,
                           c.q2.converged()));
  out.push_back(make_check(suite, "q2 cancellation residual", c.q2.residual, 0.0, 1e-8,
                           c.q2.converged()));
  out.push_back(make_check(suite, "q2 one-piece = -q1", c.q2.one_piece.value, -c.q1.value, 0.0));
  out.push_back(make_check(suite, "q2 derivative form", a.q2_derivative.value, c.q2.total.value,
                           1e-8, a.q2_derivative.converged));
  out.push_back(make_check(suite, "epsilon", c.eps.result.value, kEpsilonReference, 1e-7,
                           c.eps.result.converged));
  out.push_back(make_check(suite, "epsilon > 0", c.eps.result.value > 0.0 ? 0.0 : 1.0, 0.0, 0.0));

  // Closed forms plus eps against the nine printed digits of each moment.
  const double printed[6] = {1.0, 0.5, 0.413496672, 0.370245007, 0.342587125, 0.322726133};
  for (int n = 1; n <= 5; ++n) {
    out.push_back(make_check(suite, "moment n=" + std::to_string(n) + " (closed forms)",
                             a.closed_moments.raw[n], printed[n], 5e-10));
    out.push_back(make_check(suite, "moment n=" + std::to_string(n) + " quadrature vs closed",
                             a.moments.raw[n], a.closed_moments.raw[n],
                             std::max(10.0 * a.moments.raw_err[n], 1e-12)));
  }
  out.push_back(make_check(suite, "central n=2 (closed forms)", a.closed_moments.central2,
                           0.163496672, 5e-10));
  out.push_back(make_check(suite, "central n=4 (closed forms)", a.closed_moments.central4,
                           0.034842117, 5e-10));
  out.push_back(make_check(suite, "closed-form flags", static_cast<double>(a.table.flags.size()),
                           0.0, 0.0));

  const double raw2 = a.moments.raw[2], raw3 = a.moments.raw[3], raw4 = a.moments.raw[4];
  const double e2 = a.moments.raw_err[2], e3 = a.moments.raw_err[3];
  out.push_back(make_check(suite, "odd relation n=1", a.moments.raw[1], 0.5, 0.0));
  out.push_back(make_check(suite, "odd relation n=3", raw3, 1.5 * raw2 - 0.25,
                           10.0 * (e3 + 1.5 * e2) + 1e-13));
  out.push_back(make_check(suite, "odd relation n=5", a.moments.raw[5],
                           2.5 * raw4 - 2.5 * raw2 + 0.5, 1e-15));
  for (int i = 0; i < 3; ++i) {
    const int n = 2 * i + 1;
    const ConsistencyCheck& cc = a.moments.checks[static_cast<std::size_t>(i)];
    out.push_back(make_check(suite, "e^{pt/2}Q odd coefficient n=" + std::to_string(n),
                             a.moments.odd_shifted[static_cast<std::size_t>(i)], 0.0,
                             cc.tolerance));
  }
  out.push_back(make_check(suite, "moment table consistent", a.moments.consistent() ? 0.0 : 1.0,
                           0.0, 0.0));
  for (int n = 2; n <= 5; ++n) {
    out.push_back(make_check(suite, "raw n=" + std::to_string(n) + " < T_m moment",
                             a.moments.raw[n] < tmax::tm_moment(n) ? 0.0 : 1.0, 0.0, 0.0));
  }

  {
    const quad::QuadratureResult m0 = mean_occupation(0.0, 0.0, 2.0);
    out.push_back(make_check(suite, "mean occupation (0,0,t=2)", m0.value, 1.0, 1e-12,
                             m0.converged));
    const quad::QuadratureResult m1 = mean_occupation(0.4, -1.1, 1.5);
    const quad::QuadratureResult m2 = mean_occupation(-0.4, 1.1, 1.5);
    out.push_back(make_check(suite, "mean occupation reflection", m1.value + m2.value, 1.5,
                             1e-11, m1.converged && m2.converged));
    const quad::QuadratureResult m3 = mean_occupation(1e6, 0.0, 1.0);
    out.push_back(make_check(suite, "mean occupation x0 -> inf", m3.value, 1.0, 1e-12,
                             m3.converged));
  }
  return out;
}

// ---------------------------------------------------------------------------

struct McTargets {
  double plus_raw[6];
  double tmax_raw[6];
};

inline McTargets mc_targets(double eps = series::kEpsilonReference) {
  McTargets t{};
  for (int n = 0; n <= 5; ++n) {
    t.plus_raw[n] = series::closed::raw_moment(n, eps);
    t.tmax_raw[n] = tmax::tm_moment(n);
  }
  return t;
}

inline Check band_check(const std::string& suite, const std::string& name,
                        const mc::McEstimate& e, double target, double floor) {
  return make_check(suite, name, e.value, target, std::max(3.0 * e.std_err, floor));
}

// Checks on a rest-at-origin Monte Carlo run.
inline std::vector<Check> mc_suite(const mc::McResult& r) {
  const std::string suite = "mc";
  std::vector<Check> out;
  const McTargets t = mc_targets();
  using mc::Quantity;
  const mc::McEstimate m1 = mc::estimate(r.stats, Quantity::plus_raw, 1);
  out.push_back(band_check(suite, "T+ n=1", m1, 0.5, 0.0));
  out.push_back(make_check(suite, "T+ n=1 std err <= 5e-4", m1.std_err, 0.0, 5e-4));
  out.push_back(band_check(suite, "T+ n=2", mc::estimate(r.stats, Quantity::plus_raw, 2),
                           t.plus_raw[2], 0.003));
  for (int n = 3; n <= 5; ++n) {
    out.push_back(band_check(suite, "T+ n=" + std::to_string(n),
                             mc::estimate(r.stats, Quantity::plus_raw, n), t.plus_raw[n], 0.005));
  }
  out.push_back(band_check(suite, "T_m n=2", mc::estimate(r.stats, Quantity::tmax_raw, 2),
                           t.tmax_raw[2], 0.003));
  out.push_back(band_check(suite, "T_m n=4", mc::estimate(r.stats, Quantity::tmax_raw, 4),
                           t.tmax_raw[4], 0.005));
  for (int n : {1, 3, 5}) {
    out.push_back(band_check(suite, "T+ central n=" + std::to_string(n),
                             mc::estimate(r.stats, Quantity::plus_central, n), 0.0, 0.0));
  }
  for (int n = 2; n <= 5; ++n) {
    const mc::McEstimate d = mc::estimate(r.stats, Quantity::paired_diff, n);
    // Passes when the paired difference plus three standard errors is still negative.
    Check c{suite, "T+ < T_m n=" + std::to_string(n) + " (d + 3 sigma < 0)",
            d.value + 3.0 * d.std_err, 0.0, 0.0, true, false};
    c.passed = c.measured < 0.0;
    out.push_back(c);
  }
  out.push_back(make_check(suite, "T+ + T- = t (max residual)", r.stats.max_sum_residual, 0.0,
                           1e-9));
  out.push_back(make_check(suite, "T+/t > 0.99 observed", r.stats.near_one > 0 ? 0.0 : 1.0, 0.0,
                           0.0));
  return out;
}

inline std::vector<Check> propagator_suite(std::uint64_t seed = 99) {
  const std::string suite = "mc";
  std::vector<Check> out;
  const mc::PropagatorCheck a = mc::one_step_moments(1000000, 0.01, 0.0, seed);
  out.push_back(make_check(suite, "one-step Var(dv)/2dt", a.var_v_ratio, 1.0, 0.005));
  out.push_back(make_check(suite, "one-step Cov(dx,dv)/dt^2", a.cov_ratio, 1.0, 0.01));
  out.push_back(make_check(suite, "one-step correlation", a.correlation, std::sqrt(3.0) / 2.0,
                           0.002));
  // A single step over the whole horizon is exact as well.
  const mc::PropagatorCheck b = mc::one_step_moments(1000000, 1.0, 0.5, seed + 1);
  out.push_back(make_check(suite, "one-step t=1 Var(x)/(2t^3/3)", b.var_x_ratio, 1.0, 0.006));
  out.push_back(make_check(suite, "one-step t=1 Cov/t^2", b.cov_ratio, 1.0, 0.006));
  out.push_back(make_check(suite, "one-step t=1 Var(v)/2t", b.var_v_ratio, 1.0, 0.006));
  return out;
}

}  // namespace occtime::validation
