#pragma once

// Monte Carlo of the randomly accelerated particle x' = v, v' = eta(t) with
// <eta(t) eta(t')> = 2 delta(t - t'), using the exact Gaussian transition over
// each grid step. Estimates moments of the occupation time T+ (time with x > 0)
// and of T_m (time of the maximum of x on the path whose velocity returns to
// v0 at time t).
//
// Trajectory i draws its noise from the counter-based stream (seed, i), and
// statistics are merged per fixed-size chunk in chunk order, so results do
// not depend on the number of workers.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "occtime/philox.hpp"

namespace occtime::mc {

struct McConfig {
  std::int64_t trajectories = 100000;
  std::int64_t steps = 1000;
  double horizon_t = 1.0;
  double x0 = 0.0;
  double v0 = 0.0;
  std::uint64_t seed = 20240611;
  int workers = 1;

  double dt() const { return horizon_t / static_cast<double>(steps); }

  void validate() const {
    if (trajectories < 1) throw std::invalid_argument("McConfig: trajectories must be >= 1");
    if (steps < 100) {
      throw std::invalid_argument("McConfig: steps must be >= 100 (dt <= t/100)");
    }
    if (steps > 0xFFFFFFFFll) throw std::invalid_argument("McConfig: too many steps");
    if (!(horizon_t > 0.0) || !std::isfinite(horizon_t)) {
      throw std::invalid_argument("McConfig: horizon_t must be positive and finite");
    }
    if (!std::isfinite(x0) || !std::isfinite(v0)) {
      throw std::invalid_argument("McConfig: x0 and v0 must be finite");
    }
    if (workers < 1) throw std::invalid_argument("McConfig: workers must be >= 1");
  }
};

struct TrajectoryState {
  double x = 0.0;
  double v = 0.0;
  double t_elapsed = 0.0;
  double t_plus = 0.0;
  double x_max = 0.0;  // maximum of the signed position (velocity-bridge path)
  double t_at_max = 0.0;
};

/// Exact transition over dt: dv = sqrt(2 dt) xi1, dx = v dt + dt^{3/2}(xi1/sqrt2 + xi2/sqrt6).
inline TrajectoryState propagate_step(const TrajectoryState& s, double dt, double xi1,
                                      double xi2) {
  TrajectoryState n = s;
  const double sdt = std::sqrt(dt);
  n.v = s.v + std::sqrt(2.0) * sdt * xi1;
  n.x = s.x + s.v * dt + dt * sdt * (xi1 / std::sqrt(2.0) + xi2 / std::sqrt(6.0));
  n.t_elapsed = s.t_elapsed + dt;
  return n;
}

/// Time with x > 0 on a segment of length dt, x linear between the endpoints.
/// A segment pinned at x = 0 counts half.
inline double segment_occupation(double xa, double xb, double dt) {
  if (xa >= 0.0 && xb >= 0.0) return (xa == 0.0 && xb == 0.0) ? 0.5 * dt : dt;
  if (xa <= 0.0 && xb <= 0.0) return 0.0;
  if (xa > 0.0) return dt * xa / (xa - xb);
  return dt * xb / (xb - xa);
}

/// T+ of a path sampled on a grid.
inline double occupation_functional(std::span<const TrajectoryState> path) {
  double total = 0.0;
  for (std::size_t i = 1; i < path.size(); ++i) {
    total += segment_occupation(path[i - 1].x, path[i].x,
                                path[i].t_elapsed - path[i - 1].t_elapsed);
  }
  return total;
}

// Mean and sum of squared deviations; merged with the pairwise update.
struct RunningStat {
  double n = 0.0;
  double mean = 0.0;
  double m2 = 0.0;

  void add(double x) {
    n += 1.0;
    const double d = x - mean;
    mean += d / n;
    m2 += d * (x - mean);
  }
  void merge(const RunningStat& o) {
    if (o.n == 0.0) return;
    if (n == 0.0) {
      *this = o;
      return;
    }
    const double total = n + o.n;
    const double d = o.mean - mean;
    mean += d * o.n / total;
    m2 += o.m2 + d * d * n * o.n / total;
    n = total;
  }
  double variance() const { return n > 1.0 ? m2 / (n - 1.0) : 0.0; }
  double std_err() const { return n > 1.0 ? std::sqrt(variance() / n) : 0.0; }
};

inline constexpr int kMaxOrder = 5;
inline constexpr int kHistogramBins = 50;
inline constexpr std::int64_t kChunk = 1024;

struct TrajectoryOutcome {
  double t_plus = 0.0;   // normalised by t
  double t_minus = 0.0;  // normalised by t
  double t_max = 0.0;    // normalised by t
};

struct McStatistics {
  // Index n = 1..kMaxOrder; index 0 unused.
  std::array<RunningStat, kMaxOrder + 1> plus_raw{};
  std::array<RunningStat, kMaxOrder + 1> plus_central{};
  std::array<RunningStat, kMaxOrder + 1> tmax_raw{};
  std::array<RunningStat, kMaxOrder + 1> tmax_central{};
  std::array<RunningStat, kMaxOrder + 1> paired_diff{};  // (T+/t)^n - (T_m/t)^n
  std::array<std::uint64_t, kHistogramBins> plus_hist{};
  std::array<std::uint64_t, kHistogramBins> tmax_hist{};
  double max_sum_residual = 0.0;  // max |T+ + T- - t| / t
  std::uint64_t near_one = 0;     // trajectories with T+/t > 0.99

  void add(const TrajectoryOutcome& o) {
    double pp = 1.0, pc = 1.0, mp = 1.0, mc = 1.0;
    for (int n = 1; n <= kMaxOrder; ++n) {
      pp *= o.t_plus;
      pc *= o.t_plus - 0.5;
      mp *= o.t_max;
      mc *= o.t_max - 0.5;
      plus_raw[n].add(pp);
      plus_central[n].add(pc);
      tmax_raw[n].add(mp);
      tmax_central[n].add(mc);
      paired_diff[n].add(pp - mp);
    }
    plus_hist[bin(o.t_plus)] += 1;
    tmax_hist[bin(o.t_max)] += 1;
    max_sum_residual = std::max(max_sum_residual, std::fabs(o.t_plus + o.t_minus - 1.0));
    if (o.t_plus > 0.99) ++near_one;
  }

  void merge(const McStatistics& o) {
    for (int n = 1; n <= kMaxOrder; ++n) {
      plus_raw[n].merge(o.plus_raw[n]);
      plus_central[n].merge(o.plus_central[n]);
      tmax_raw[n].merge(o.tmax_raw[n]);
      tmax_central[n].merge(o.tmax_central[n]);
      paired_diff[n].merge(o.paired_diff[n]);
    }
    for (int b = 0; b < kHistogramBins; ++b) {
      plus_hist[b] += o.plus_hist[b];
      tmax_hist[b] += o.tmax_hist[b];
    }
    max_sum_residual = std::max(max_sum_residual, o.max_sum_residual);
    near_one += o.near_one;
  }

  static int bin(double u) {
    const int b = static_cast<int>(u * kHistogramBins);
    return std::clamp(b, 0, kHistogramBins - 1);
  }
};

namespace detail {

// Time of the maximum given the grid maximum at step i and the velocities at
// steps i-1, i, i+1: the zero of v is interpolated on the side it lies.
inline double refine_max_time(std::int64_t i, std::int64_t steps, double dt, double v_prev,
                              double v_at, double v_next) {
  const double t_i = static_cast<double>(i) * dt;
  if (v_at > 0.0 && i < steps && v_next < 0.0) {
    return t_i + dt * v_at / (v_at - v_next);
  }
  if (v_at < 0.0 && i > 0 && v_prev > 0.0) {
    return t_i - dt + dt * v_prev / (v_prev - v_at);
  }
  return t_i;
}

}  // namespace detail

// Per-thread path buffers, reused across trajectories.
struct PathWorkspace {
  std::vector<double> x;
  std::vector<double> v;
};

// T_m is the time of the maximum of the velocity-bridge path
//   v_b(s) = v(s) - (s/t)(v(t) - v0),  x_b(s) = x(s) - s^2/(2t) (v(t) - v0),
// which is built from the same grid values and is exact at the grid points.
inline double bridge_max_time(const McConfig& cfg, PathWorkspace& ws,
                              TrajectoryState* state = nullptr) {
  const double dt = cfg.dt();
  const double t = cfg.horizon_t;
  const std::int64_t steps = cfg.steps;
  const double dv_end = ws.v[static_cast<std::size_t>(steps)] - cfg.v0;
  auto xb = [&](std::int64_t k) {
    const double s = static_cast<double>(k) * dt;
    return ws.x[static_cast<std::size_t>(k)] - s * s / (2.0 * t) * dv_end;
  };
  auto vb = [&](std::int64_t k) {
    const double s = static_cast<double>(k) * dt;
    return ws.v[static_cast<std::size_t>(k)] - s / t * dv_end;
  };
  std::int64_t best = 0;
  double best_x = xb(0);
  for (std::int64_t k = 1; k <= steps; ++k) {
    const double value = xb(k);
    if (value > best_x) {
      best_x = value;
      best = k;
    }
  }
  const double v_prev = best > 0 ? vb(best - 1) : vb(best);
  const double v_next = best < steps ? vb(best + 1) : vb(best);
  const double t_max =
      std::clamp(detail::refine_max_time(best, steps, dt, v_prev, vb(best), v_next), 0.0, t);
  if (state != nullptr) {
    state->x_max = best_x;
    state->t_at_max = t_max;
  }
  return t_max;
}

inline TrajectoryOutcome simulate_trajectory(const McConfig& cfg, const rng::Key& key,
                                             std::uint64_t index, PathWorkspace& ws) {
  const double dt = cfg.dt();
  const std::size_t n_points = static_cast<std::size_t>(cfg.steps) + 1;
  ws.x.resize(n_points);
  ws.v.resize(n_points);
  TrajectoryState s;
  s.x = cfg.x0;
  s.v = cfg.v0;
  ws.x[0] = s.x;
  ws.v[0] = s.v;
  double t_minus = 0.0;
  for (std::int64_t k = 0; k < cfg.steps; ++k) {
    const rng::NormalPair xi = rng::normal_pair(key, index, static_cast<std::uint32_t>(k));
    TrajectoryState n = propagate_step(s, dt, xi.first, xi.second);
    n.t_plus = s.t_plus + segment_occupation(s.x, n.x, dt);
    t_minus += segment_occupation(-s.x, -n.x, dt);
    ws.x[static_cast<std::size_t>(k) + 1] = n.x;
    ws.v[static_cast<std::size_t>(k) + 1] = n.v;
    s = n;
  }
  const double t_max = bridge_max_time(cfg, ws, &s);
  return {s.t_plus / cfg.horizon_t, t_minus / cfg.horizon_t, t_max / cfg.horizon_t};
}

struct McResult {
  McConfig config;
  McStatistics stats;
};

inline McResult run(const McConfig& cfg) {
  cfg.validate();
  const rng::Key key = rng::key_from_seed(cfg.seed);
  const std::int64_t chunks = (cfg.trajectories + kChunk - 1) / kChunk;
  std::vector<McStatistics> per_chunk(static_cast<std::size_t>(chunks));
  std::atomic<std::int64_t> next{0};
  auto worker = [&] {
    for (;;) {
      const std::int64_t c = next.fetch_add(1);
      if (c >= chunks) return;
      McStatistics local;
      PathWorkspace ws;
      const std::int64_t begin = c * kChunk;
      const std::int64_t end = std::min(begin + kChunk, cfg.trajectories);
      for (std::int64_t i = begin; i < end; ++i) {
        local.add(simulate_trajectory(cfg, key, static_cast<std::uint64_t>(i), ws));
      }
      per_chunk[static_cast<std::size_t>(c)] = local;
    }
  };
  const int n_threads =
      static_cast<int>(std::min<std::int64_t>(cfg.workers, std::max<std::int64_t>(chunks, 1)));
  std::vector<std::thread> pool;
  for (int w = 1; w < n_threads; ++w) pool.emplace_back(worker);
  worker();
  for (std::thread& t : pool) t.join();

  McResult result;
  result.config = cfg;
  for (const McStatistics& s : per_chunk) result.stats.merge(s);
  return result;
}

enum class Quantity { plus_raw, plus_central, tmax_raw, tmax_central, paired_diff };

inline const char* to_string(Quantity q) {
  switch (q) {
    case Quantity::plus_raw: return "Tplus_raw";
    case Quantity::plus_central: return "Tplus_central";
    case Quantity::tmax_raw: return "Tm_raw";
    case Quantity::tmax_central: return "Tm_central";
    case Quantity::paired_diff: return "Tplus_minus_Tm";
  }
  return "unknown";
}

struct McEstimate {
  Quantity quantity = Quantity::plus_raw;
  int moment_order = 1;
  double value = 0.0;
  double std_err = 0.0;
  std::int64_t n_samples = 0;
};

inline McEstimate estimate(const McStatistics& s, Quantity q, int n) {
  if (n < 1 || n > kMaxOrder) throw std::invalid_argument("estimate: order must be in 1..5");
  const RunningStat* table = nullptr;
  switch (q) {
    case Quantity::plus_raw: table = s.plus_raw.data(); break;
    case Quantity::plus_central: table = s.plus_central.data(); break;
    case Quantity::tmax_raw: table = s.tmax_raw.data(); break;
    case Quantity::tmax_central: table = s.tmax_central.data(); break;
    case Quantity::paired_diff: table = s.paired_diff.data(); break;
  }
  const RunningStat& r = table[n];
  return {q, n, r.mean, r.std_err(), static_cast<std::int64_t>(r.n)};
}

namespace detail {

inline void check_orders(std::span<const int> orders) {
  for (int n : orders) {
    if (n < 1 || n > kMaxOrder) throw std::invalid_argument("orders must lie in 1..5");
  }
}

}  // namespace detail

/// Raw and central moments of T+/t for the requested orders.
inline std::vector<McEstimate> estimate_moments(const McConfig& cfg, std::span<const int> orders) {
  detail::check_orders(orders);
  const McResult r = run(cfg);
  std::vector<McEstimate> out;
  for (int n : orders) out.push_back(estimate(r.stats, Quantity::plus_raw, n));
  for (int n : orders) out.push_back(estimate(r.stats, Quantity::plus_central, n));
  return out;
}

/// Raw moments of T_m/t; requires a start at rest at the origin.
inline std::vector<McEstimate> estimate_tmax_moments(const McConfig& cfg,
                                                     std::span<const int> orders) {
  if (cfg.x0 != 0.0 || cfg.v0 != 0.0) {
    throw std::invalid_argument("estimate_tmax_moments: requires x0 = v0 = 0");
  }
  detail::check_orders(orders);
  const McResult r = run(cfg);
  std::vector<McEstimate> out;
  for (int n : orders) out.push_back(estimate(r.stats, Quantity::tmax_raw, n));
  return out;
}

struct PropagatorCheck {
  double var_v_ratio = 0.0;   // sample Var(dv) / (2 dt)
  double var_x_ratio = 0.0;   // sample Var(dx) / ((2/3) dt^3)
  double cov_ratio = 0.0;     // sample Cov(dx, dv) / dt^2
  double correlation = 0.0;   // expected sqrt(3)/2
  double mean_dv = 0.0;
  double mean_dx_minus_drift = 0.0;  // mean of dx - v dt, expected 0
};

// Sample moments of single exact steps of length dt from (0, v_start).
inline PropagatorCheck one_step_moments(std::int64_t draws, double dt, double v_start,
                                        std::uint64_t seed) {
  if (draws < 2 || !(dt > 0.0)) throw std::invalid_argument("one_step_moments: bad arguments");
  const rng::Key key = rng::key_from_seed(seed);
  RunningStat sx, sv;
  double cxv = 0.0;  // co-moment, updated alongside the means
  for (std::int64_t i = 0; i < draws; ++i) {
    const rng::NormalPair xi = rng::normal_pair(key, static_cast<std::uint64_t>(i), 0u);
    TrajectoryState s;
    s.v = v_start;
    const TrajectoryState n = propagate_step(s, dt, xi.first, xi.second);
    const double dx = n.x - v_start * dt;
    const double dv = n.v - v_start;
    const double old_mean_x = sx.mean;
    sx.add(dx);
    sv.add(dv);
    cxv += (dx - old_mean_x) * (dv - sv.mean);
  }
  PropagatorCheck c;
  const double nm1 = static_cast<double>(draws - 1);
  const double cov = cxv / nm1;
  c.var_v_ratio = sv.variance() / (2.0 * dt);
  c.var_x_ratio = sx.variance() / (2.0 / 3.0 * dt * dt * dt);
  c.cov_ratio = cov / (dt * dt);
  c.correlation = cov / std::sqrt(sx.variance() * sv.variance());
  c.mean_dv = sv.mean;
  c.mean_dx_minus_drift = sx.mean;
  return c;
}

}  // namespace occtime::mc
