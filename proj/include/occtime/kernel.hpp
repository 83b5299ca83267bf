#pragma once

// Overlap kernel k(F,G) = int dv v psi_{s,F}(-v) psi_{s+p,G}(v) between basis
// functions at Laplace parameters s and s+p, and the symmetric second-iterate
// kernel K(F,G) = -int dH k(F,H) k(G,H).

#include <cmath>
#include <stdexcept>

#include "occtime/airy_basis.hpp"
#include "occtime/quadrature.hpp"
#include "occtime/specfun.hpp"

namespace occtime::kernel {

struct KernelParams {
  double s = 1.0;
  double p = 0.0;
  double F = 1.0;
  double G = 1.0;

  // p may be negative as long as s + p > 0; that is the s <-> s+p swapped kernel.
  void validate() const {
    if (!std::isfinite(s) || !std::isfinite(p) || !std::isfinite(F) || !std::isfinite(G)) {
      throw std::domain_error("KernelParams: non-finite component");
    }
    if (!(s > 0.0) || !(s + p > 0.0) || !(F > 0.0) || !(G > 0.0)) {
      throw std::domain_error("KernelParams: need s > 0, s + p > 0, F > 0, G > 0");
    }
  }

  double airy_argument() const {
    return ((s + p) * F + s * G) / (std::cbrt(F + G) * std::pow(F * G, 2.0 / 3.0));
  }
};

inline double k_closed(const KernelParams& k) {
  k.validate();
  if (k.p == 0.0) return 0.0;
  return -k.p * std::pow(k.F * k.G, -1.0 / 6.0) * std::pow(k.F + k.G, -4.0 / 3.0) *
         specfun::airy_ai(k.airy_argument()).value;
}

struct KernelOracle {
  quad::QuadratureResult weighted;  // int v psi psi dv, the defining integral
  quad::QuadratureResult reduced;   // -p/(F+G) int psi psi dv
  bool converged() const { return weighted.converged && reduced.converged; }
};

// Both quadrature routes to k. Their agreement with each other and with
// k_closed is the kernel's correctness check.
inline KernelOracle k_oracle(const KernelParams& k, double abs_tol = 1e-15) {
  k.validate();
  KernelOracle out;
  out.weighted = basis::overlap(k.s, k.F, k.s + k.p, k.G, 1, abs_tol);
  out.reduced = basis::overlap(k.s, k.F, k.s + k.p, k.G, 0, abs_tol);
  const double factor = -k.p / (k.F + k.G);
  out.reduced.value *= factor;
  out.reduced.err_est *= std::fabs(factor);
  return out;
}

// K(F,G) = -int_0^inf dH k(F,H) k(G,H). The integrand falls off like H^{-3}.
inline quad::QuadratureResult K_fredholm(double s, double p, double F, double G,
                                         double rel_tol = 1e-12, double abs_tol = 1e-300) {
  KernelParams probe{s, p, F, G};
  probe.validate();
  auto integrand = [=](double H) {
    if (H <= 0.0) return 0.0;
    return -k_closed({s, p, F, H}) * k_closed({s, p, G, H});
  };
  return quad::integrate_1d(
      integrand,
      quad::QuadratureSpec::half_line(0.0, quad::DecayHint::algebraic(-3.0), rel_tol, abs_tol));
}

}  // namespace occtime::kernel
