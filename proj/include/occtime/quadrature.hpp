#pragma once

// Adaptive Gauss-Kronrod (7/15) quadrature on finite and semi-infinite
// intervals, plus nesting up to four dimensions.
//
// Panels are bisected globally by largest error estimate. Ties are broken by
// panel position and the final sum is taken in left-to-right order, so a given
// integrand and spec always produce bit-identical output.
//
// Semi-infinite intervals are either truncated (Airy-type decay, cutoff from
// the tolerance) or mapped onto [0, 1) by x = a + (1-u)^{-k} - 1 with k chosen
// from the algebraic decay exponent so the mapped integrand vanishes at u = 1.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <type_traits>
#include <utility>
#include <vector>

namespace occtime::quad {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

// Tightest relative tolerance handed to an inner level; the Airy-weighted inner
// integrals reach round-off near 1e-14.
inline constexpr double kInnerRelFloor = 1e-13;

struct DecayHint {
  enum class Kind { none, airy_exponential, algebraic };
  Kind kind = Kind::none;
  double exponent = 0.0;  // only for Kind::algebraic; integrand ~ x^exponent

  static constexpr DecayHint none() { return {Kind::none, 0.0}; }
  static constexpr DecayHint airy() { return {Kind::airy_exponential, 0.0}; }
  static constexpr DecayHint algebraic(double exponent) {
    return {Kind::algebraic, exponent};
  }
};

struct QuadratureSpec {
  double lower = 0.0;
  double upper = kInf;
  double rel_tol = 1e-10;
  double abs_tol = 1e-13;
  int max_subdivisions = 4000;
  DecayHint decay = DecayHint::none();

  static QuadratureSpec finite(double a, double b, double rel_tol = 1e-10,
                               double abs_tol = 1e-13) {
    QuadratureSpec s;
    s.lower = a;
    s.upper = b;
    s.rel_tol = rel_tol;
    s.abs_tol = abs_tol;
    return s;
  }
  static QuadratureSpec half_line(double a, DecayHint hint, double rel_tol = 1e-10,
                                  double abs_tol = 1e-13) {
    QuadratureSpec s;
    s.lower = a;
    s.upper = kInf;
    s.decay = hint;
    s.rel_tol = rel_tol;
    s.abs_tol = abs_tol;
    return s;
  }

  bool semi_infinite() const { return std::isinf(upper); }

  void validate() const {
    if (!(rel_tol > 0.0) || !(abs_tol > 0.0)) {
      throw std::invalid_argument("QuadratureSpec: tolerances must be positive");
    }
    if (max_subdivisions < 1) {
      throw std::invalid_argument("QuadratureSpec: max_subdivisions must be >= 1");
    }
    if (!std::isfinite(lower)) {
      throw std::invalid_argument("QuadratureSpec: lower limit must be finite");
    }
    if (!(upper >= lower)) {
      throw std::invalid_argument("QuadratureSpec: upper < lower");
    }
    if (decay.kind == DecayHint::Kind::algebraic && !(decay.exponent < -1.0)) {
      throw std::invalid_argument("QuadratureSpec: algebraic decay exponent must be < -1");
    }
  }

  // Tolerances for the next nesting level. Relative tolerance is floored a
  // little above double round-off.
  QuadratureSpec tightened(double factor = 100.0) const {
    QuadratureSpec s = *this;
    s.rel_tol = std::max(rel_tol / factor, kInnerRelFloor);
    s.abs_tol = std::max(abs_tol / factor, 1e-300);
    return s;
  }

  // Airy truncation point for [lower, inf): beyond it the tail is below
  // max(abs_tol, rel_tol * |I|) / 10 for integrands decaying like Ai.
  double airy_cutoff() const {
    const double a = std::max(lower, 0.0);
    const double l_abs = -std::log(abs_tol / 10.0);
    const double l_rel = -std::log(rel_tol / 10.0);
    const double x_abs = std::pow(1.5 * l_abs, 2.0 / 3.0);
    const double x_rel = std::pow(a * std::sqrt(a) + 1.5 * l_rel, 2.0 / 3.0);
    return std::max(std::min(x_abs, x_rel), lower + 1.0);
  }
};

struct QuadratureResult {
  double value = 0.0;
  double err_est = 0.0;
  double inner_err = 0.0;  // part of err_est propagated up from nested levels
  long evaluations = 0;
  bool converged = false;
  int failed_level = -1;  // nesting level that failed (0 = outermost), -1 if none
  long inner_unconverged = 0;  // inner integrals that missed their own target
  double cutoff = kInf;   // truncation point used for Airy-type half lines
};

// Value of an integrand that is itself an integral: carries the inner error
// so the outer level can propagate it.
struct Sample {
  double value = 0.0;
  double err = 0.0;
  long evaluations = 1;
  bool converged = true;
  int failed_level = -1;
};

inline Sample to_sample(const QuadratureResult& r) {
  return {r.value, r.err_est, r.evaluations, r.converged, r.failed_level};
}

class EvaluationError : public std::runtime_error {
 public:
  EvaluationError(double abscissa, int level)
      : std::runtime_error("integrand returned a non-finite value at x = " +
                           std::to_string(abscissa) + " (level " +
                           std::to_string(level) + ")"),
        abscissa_(abscissa),
        level_(level) {}
  double abscissa() const { return abscissa_; }
  int level() const { return level_; }

 private:
  double abscissa_;
  int level_;
};

namespace detail {

inline constexpr std::array<double, 8> kXgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr std::array<double, 8> kWgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr std::array<double, 4> kWg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Panel {
  double a = 0.0;
  double b = 0.0;
  double value = 0.0;
  double err = 0.0;
  double noise = 0.0;  // propagated inner-integration error
};

// Worst panel first; ties broken by position for determinism.
struct PanelOrder {
  bool operator()(const Panel& lhs, const Panel& rhs) const {
    if (lhs.err != rhs.err) return lhs.err < rhs.err;
    return lhs.a > rhs.a;
  }
};

struct Tally {
  long evaluations = 0;
  long inner_unconverged = 0;
  int failed_level = -1;
};

// Identity map on a finite interval.
struct IdentityMap {
  double operator()(double u, double& jac) const {
    jac = 1.0;
    return u;
  }
};

// x = a + ((1-u)^{-k} - 1) on u in [0, 1).
struct AlgebraicMap {
  double a = 0.0;
  double k = 2.0;
  double operator()(double u, double& jac) const {
    const double w = 1.0 - u;
    const double wk = std::pow(w, -k);
    jac = k * wk / w;
    return a + (wk - 1.0);
  }
};

template <class F>
Sample evaluate(F& f, double x) {
  using R = std::invoke_result_t<F&, double>;
  if constexpr (std::is_same_v<std::remove_cvref_t<R>, Sample>) {
    return f(x);
  } else {
    return Sample{static_cast<double>(f(x)), 0.0, 1, true, -1};
  }
}

template <class F, class Map>
Panel gk15(F& f, const Map& map, double a, double b, int level, Tally& tally) {
  const double center = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  const double abs_half = std::fabs(half);

  double fv[15];
  double ev[15];
  auto eval_at = [&](double u, int slot) {
    double jac = 1.0;
    const double x = map(u, jac);
    if (!std::isfinite(x) || !std::isfinite(jac)) {
      fv[slot] = 0.0;
      ev[slot] = 0.0;
      return;
    }
    const Sample s = evaluate(f, x);
    tally.evaluations += s.evaluations;
    if (!s.converged) {
      ++tally.inner_unconverged;
      if (tally.failed_level < 0) tally.failed_level = s.failed_level;
    }
    if (!std::isfinite(s.value)) throw EvaluationError(x, level);
    fv[slot] = s.value * jac;
    ev[slot] = std::fabs(s.err * jac);
  };
  eval_at(center, 7);
  for (int j = 0; j < 7; ++j) {
    const double dx = half * kXgk[j];
    eval_at(center - dx, j);
    eval_at(center + dx, 14 - j);
  }

  const double fc = fv[7];
  double resk = fc * kWgk[7];
  double resg = fc * kWg[3];
  double resabs = std::fabs(resk);
  double noise = ev[7] * kWgk[7];
  for (int j = 0; j < 7; ++j) {
    const double f1 = fv[j], f2 = fv[14 - j];
    resk += kWgk[j] * (f1 + f2);
    resabs += kWgk[j] * (std::fabs(f1) + std::fabs(f2));
    noise += kWgk[j] * (ev[j] + ev[14 - j]);
    if (j % 2 == 1) resg += kWg[j / 2] * (f1 + f2);
  }
  const double reskh = resk * 0.5;
  double resasc = kWgk[7] * std::fabs(fc - reskh);
  for (int j = 0; j < 7; ++j) {
    resasc += kWgk[j] * (std::fabs(fv[j] - reskh) + std::fabs(fv[14 - j] - reskh));
  }
  resk *= half;
  resabs *= abs_half;
  resasc *= abs_half;
  double err = std::fabs((resk - resg * half));
  constexpr double eps = std::numeric_limits<double>::epsilon();
  constexpr double uflow = std::numeric_limits<double>::min();
  if (resasc != 0.0 && err != 0.0) {
    err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
  }
  if (resabs > uflow / (50.0 * eps)) err = std::max(50.0 * eps * resabs, err);
  return Panel{a, b, resk, err, noise * abs_half};
}

// Core global-adaptive driver on [a, b] in the mapped variable.
template <class F, class Map>
QuadratureResult adaptive(F& f, const Map& map, double a, double b, double rel_tol,
                          double abs_tol, int max_subdivisions, int level) {
  QuadratureResult out;
  if (a == b) {
    out.converged = true;
    return out;
  }
  Tally tally;
  std::vector<Panel> heap;
  heap.reserve(static_cast<std::size_t>(max_subdivisions) + 1);
  heap.push_back(gk15(f, map, a, b, level, tally));

  double value = heap.front().value;
  double err = heap.front().err;
  double noise = heap.front().noise;
  constexpr double eps = std::numeric_limits<double>::epsilon();
  bool too_narrow = false;
  int subdivisions = 1;
  auto target = [&] { return std::max(abs_tol, rel_tol * std::fabs(value)); };

  while (err + noise > target() && err > 0.25 * target() &&
         subdivisions < max_subdivisions) {
    std::pop_heap(heap.begin(), heap.end(), PanelOrder{});
    const Panel worst = heap.back();
    heap.pop_back();
    const double mid = 0.5 * (worst.a + worst.b);
    if (std::fabs(worst.b - worst.a) <
        64.0 * eps * std::max(std::fabs(worst.a), std::fabs(worst.b)) + 1e-300) {
      heap.push_back(worst);
      std::push_heap(heap.begin(), heap.end(), PanelOrder{});
      too_narrow = true;
      break;
    }
    const Panel left = gk15(f, map, worst.a, mid, level, tally);
    const Panel right = gk15(f, map, mid, worst.b, level, tally);
    value += left.value + right.value - worst.value;
    err += left.err + right.err - worst.err;
    noise += left.noise + right.noise - worst.noise;
    heap.push_back(left);
    std::push_heap(heap.begin(), heap.end(), PanelOrder{});
    heap.push_back(right);
    std::push_heap(heap.begin(), heap.end(), PanelOrder{});
    ++subdivisions;
  }

  // Deterministic left-to-right reduction.
  std::sort(heap.begin(), heap.end(),
            [](const Panel& l, const Panel& r) { return l.a < r.a; });
  double sum = 0.0, err_sum = 0.0, noise_sum = 0.0;
  for (const Panel& p : heap) {
    sum += p.value;
    err_sum += p.err;
    noise_sum += p.noise;
  }
  out.value = sum;
  out.err_est = err_sum + noise_sum;
  out.inner_err = noise_sum;
  out.evaluations = tally.evaluations;
  out.inner_unconverged = tally.inner_unconverged;
  // err_est already carries the inner errors, so it alone decides convergence;
  // an inner integral that stopped at its round-off floor is not a failure.
  const double final_target = std::max(abs_tol, rel_tol * std::fabs(sum));
  out.converged = !too_narrow && out.err_est <= final_target;
  if (!out.converged) {
    out.failed_level = tally.failed_level >= 0 ? tally.failed_level : level;
  }
  return out;
}

inline void accumulate(QuadratureResult& into, const QuadratureResult& piece) {
  into.value += piece.value;
  into.err_est += piece.err_est;
  into.inner_err += piece.inner_err;
  into.evaluations += piece.evaluations;
  into.inner_unconverged += piece.inner_unconverged;
  if (!piece.converged) {
    into.converged = false;
    if (into.failed_level < 0) into.failed_level = piece.failed_level;
  }
}

}  // namespace detail

// Integrates f over spec's domain. f may return double or Sample.
template <class F>
QuadratureResult integrate_1d(F&& f, const QuadratureSpec& spec, int level = 0) {
  spec.validate();
  if (!spec.semi_infinite()) {
    return detail::adaptive(f, detail::IdentityMap{}, spec.lower, spec.upper,
                            spec.rel_tol, spec.abs_tol, spec.max_subdivisions, level);
  }
  if (spec.decay.kind == DecayHint::Kind::airy_exponential) {
    double cutoff = spec.airy_cutoff();
    QuadratureResult out =
        detail::adaptive(f, detail::IdentityMap{}, spec.lower, cutoff, spec.rel_tol,
                         spec.abs_tol, spec.max_subdivisions, level);
    // Extend while the integrand at the cutoff is not negligible, e.g. when a
    // polynomial prefactor slows the Airy decay.
    for (int extension = 0; extension < 60; ++extension) {
      const double tail_scale =
          std::fabs(detail::evaluate(f, cutoff).value) * std::max(1.0, 1.0 / std::sqrt(cutoff));
      const double target = std::max(spec.abs_tol, spec.rel_tol * std::fabs(out.value));
      if (tail_scale <= 0.1 * target) break;
      const double next = cutoff + 0.5 * (cutoff - spec.lower) + 1.0;
      const QuadratureResult piece =
          detail::adaptive(f, detail::IdentityMap{}, cutoff, next, spec.rel_tol,
                           spec.abs_tol, spec.max_subdivisions, level);
      detail::accumulate(out, piece);
      cutoff = next;
    }
    out.cutoff = cutoff;
    return out;
  }
  const double exponent = spec.decay.kind == DecayHint::Kind::algebraic
                              ? spec.decay.exponent
                              : -2.0;
  detail::AlgebraicMap map{spec.lower, std::max(1.0, 2.0 / (-exponent - 1.0))};
  return detail::adaptive(f, map, 0.0, 1.0, spec.rel_tol, spec.abs_tol,
                          spec.max_subdivisions, level);
}

namespace detail {

template <std::size_t D, std::size_t Level, class F>
QuadratureResult nested_level(F& f, std::array<double, D>& point,
                              std::span<const QuadratureSpec, D> specs) {
  if constexpr (Level + 1 == D) {
    auto inner = [&](double x) {
      point[Level] = x;
      return f(std::as_const(point));
    };
    return integrate_1d(inner, specs[Level], static_cast<int>(Level));
  } else {
    auto inner = [&](double x) {
      point[Level] = x;
      return to_sample(nested_level<D, Level + 1>(f, point, specs));
    };
    return integrate_1d(inner, specs[Level], static_cast<int>(Level));
  }
}

}  // namespace detail

// Integrates f(x_0, ..., x_{D-1}) with specs ordered outermost to innermost.
// Inner errors are propagated to the outer estimate as integrand noise;
// failed_level reports the deepest level that did not converge.
template <std::size_t D, class F>
QuadratureResult integrate_nested(F&& f, std::span<const QuadratureSpec, D> specs) {
  static_assert(D >= 2 && D <= 4, "integrate_nested supports 2 to 4 dimensions");
  for (std::size_t i = 1; i < D; ++i) {
    if (specs[i].rel_tol > specs[i - 1].rel_tol) {
      throw std::invalid_argument(
          "integrate_nested: inner tolerances must not be looser than outer ones");
    }
  }
  std::array<double, D> point{};
  return detail::nested_level<D, 0>(f, point, specs);
}

template <std::size_t D, class F>
QuadratureResult integrate_nested(F&& f, const std::array<QuadratureSpec, D>& specs) {
  return integrate_nested<D>(std::forward<F>(f), std::span<const QuadratureSpec, D>(specs));
}

// Chain of specs where each inner level is `factor` tighter than the one above.
template <std::size_t D>
std::array<QuadratureSpec, D> nested_specs(std::array<QuadratureSpec, D> domains,
                                           double factor = 100.0) {
  for (std::size_t i = 1; i < D; ++i) {
    const QuadratureSpec t = domains[i - 1].tightened(factor);
    domains[i].rel_tol = t.rel_tol;
    domains[i].abs_tol = t.abs_tol;
  }
  return domains;
}

}  // namespace occtime::quad
