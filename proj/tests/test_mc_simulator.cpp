#include <gtest/gtest.h>

#include <cmath>
#include <cstring>
#include <numbers>
#include <vector>

#include "occtime/mc_simulator.hpp"
#include "occtime/perturbation.hpp"
#include "occtime/tmax_reference.hpp"

namespace mc = occtime::mc;

namespace {

mc::McConfig small_config(std::int64_t trajectories, std::int64_t steps, std::uint64_t seed) {
  mc::McConfig c;
  c.trajectories = trajectories;
  c.steps = steps;
  c.seed = seed;
  return c;
}

bool same_bits(double a, double b) { return std::memcmp(&a, &b, sizeof a) == 0; }

void expect_identical(const mc::RunningStat& a, const mc::RunningStat& b) {
  EXPECT_TRUE(same_bits(a.n, b.n));
  EXPECT_TRUE(same_bits(a.mean, b.mean));
  EXPECT_TRUE(same_bits(a.m2, b.m2));
}

}  // namespace

TEST(Propagator, ExactStepFormula) {
  mc::TrajectoryState s;
  s.x = 0.2;
  s.v = -0.7;
  const double dt = 0.04, a = 0.3, b = -1.1;
  const mc::TrajectoryState n = mc::propagate_step(s, dt, a, b);
  EXPECT_DOUBLE_EQ(n.v, -0.7 + std::sqrt(2.0 * dt) * a);
  EXPECT_DOUBLE_EQ(n.x, 0.2 - 0.7 * dt + std::pow(dt, 1.5) * (a / std::sqrt(2.0) + b / std::sqrt(6.0)));
  EXPECT_DOUBLE_EQ(n.t_elapsed, dt);
}

TEST(Propagator, SampleCovarianceMatchesExactTransition) {
  const mc::PropagatorCheck c = mc::one_step_moments(200000, 0.05, 0.4, 11);
  EXPECT_NEAR(c.var_v_ratio, 1.0, 0.016);
  EXPECT_NEAR(c.var_x_ratio, 1.0, 0.016);
  EXPECT_NEAR(c.cov_ratio, 1.0, 0.016);
  EXPECT_NEAR(c.correlation, std::sqrt(3.0) / 2.0, 0.003);
  EXPECT_NEAR(c.mean_dv, 0.0, 5.0 * std::sqrt(0.1 / 200000));
  EXPECT_THROW(mc::one_step_moments(1, 0.1, 0.0, 1), std::invalid_argument);
}

TEST(Occupation, SegmentCases) {
  EXPECT_EQ(mc::segment_occupation(1.0, 2.0, 0.1), 0.1);
  EXPECT_EQ(mc::segment_occupation(-1.0, -2.0, 0.1), 0.0);
  EXPECT_DOUBLE_EQ(mc::segment_occupation(1.0, -3.0, 0.4), 0.1);
  EXPECT_DOUBLE_EQ(mc::segment_occupation(-3.0, 1.0, 0.4), 0.1);
  EXPECT_EQ(mc::segment_occupation(0.0, 0.0, 0.2), 0.1);
  EXPECT_EQ(mc::segment_occupation(0.0, 1.0, 0.2), 0.2);
  // Positive and negative parts partition the segment.
  for (auto [a, b] : {std::pair{0.3, -0.9}, std::pair{-2.0, 0.5}, std::pair{0.0, 0.0}}) {
    EXPECT_DOUBLE_EQ(mc::segment_occupation(a, b, 0.3) + mc::segment_occupation(-a, -b, 0.3), 0.3);
  }
}

TEST(Occupation, FunctionalOnGridPath) {
  std::vector<mc::TrajectoryState> path(4);
  const double xs[] = {1.0, -1.0, -2.0, 2.0};
  for (int i = 0; i < 4; ++i) {
    path[i].x = xs[i];
    path[i].t_elapsed = 0.5 * i;
  }
  EXPECT_DOUBLE_EQ(mc::occupation_functional(path), 0.25 + 0.0 + 0.25);
}

TEST(Statistics, RunningStatMergeMatchesSequential) {
  mc::RunningStat all, left, right;
  for (int i = 0; i < 1000; ++i) {
    const double x = std::sin(0.37 * i) + 0.01 * i;
    all.add(x);
    (i < 313 ? left : right).add(x);
  }
  left.merge(right);
  EXPECT_EQ(left.n, all.n);
  EXPECT_NEAR(left.mean, all.mean, 1e-14);
  EXPECT_NEAR(left.variance(), all.variance(), 1e-13);
  mc::RunningStat empty;
  empty.merge(all);
  EXPECT_EQ(empty.mean, all.mean);
}

TEST(Statistics, EstimateRejectsBadOrder) {
  mc::McStatistics s;
  EXPECT_THROW(mc::estimate(s, mc::Quantity::plus_raw, 0), std::invalid_argument);
  EXPECT_THROW(mc::estimate(s, mc::Quantity::plus_raw, 6), std::invalid_argument);
}

TEST(MaxTime, RefinementInterpolatesVelocityZero) {
  EXPECT_DOUBLE_EQ(mc::detail::refine_max_time(5, 10, 0.1, 0.3, 0.1, -0.3), 0.525);
  EXPECT_DOUBLE_EQ(mc::detail::refine_max_time(5, 10, 0.1, 0.3, -0.1, -0.3), 0.475);
  EXPECT_DOUBLE_EQ(mc::detail::refine_max_time(10, 10, 0.1, 0.3, 0.2, 0.2), 1.0);
  EXPECT_DOUBLE_EQ(mc::detail::refine_max_time(0, 10, 0.1, -0.1, -0.1, -0.2), 0.0);
}

TEST(Config, ValidationErrors) {
  mc::McConfig c = small_config(10, 100, 1);
  EXPECT_NO_THROW(c.validate());
  mc::McConfig bad = c;
  bad.steps = 99;
  EXPECT_THROW(mc::run(bad), std::invalid_argument);
  bad = c;
  bad.trajectories = 0;
  EXPECT_THROW(bad.validate(), std::invalid_argument);
  bad = c;
  bad.horizon_t = -1.0;
  EXPECT_THROW(bad.validate(), std::invalid_argument);
  bad = c;
  bad.x0 = NAN;
  EXPECT_THROW(bad.validate(), std::invalid_argument);
  bad = c;
  bad.workers = 0;
  EXPECT_THROW(bad.validate(), std::invalid_argument);
  bad = c;
  bad.v0 = 0.5;
  const int orders[] = {1};
  EXPECT_THROW(mc::estimate_tmax_moments(bad, orders), std::invalid_argument);
  const int bad_orders[] = {6};
  EXPECT_THROW(mc::estimate_moments(c, bad_orders), std::invalid_argument);
}

TEST(Run, DeterministicAcrossWorkerCounts) {
  mc::McConfig c = small_config(5000, 200, 77);
  const mc::McResult one = mc::run(c);
  c.workers = 3;
  const mc::McResult three = mc::run(c);
  for (int n = 1; n <= mc::kMaxOrder; ++n) {
    expect_identical(one.stats.plus_raw[n], three.stats.plus_raw[n]);
    expect_identical(one.stats.plus_central[n], three.stats.plus_central[n]);
    expect_identical(one.stats.tmax_raw[n], three.stats.tmax_raw[n]);
    expect_identical(one.stats.paired_diff[n], three.stats.paired_diff[n]);
  }
  EXPECT_EQ(one.stats.plus_hist, three.stats.plus_hist);
  EXPECT_EQ(one.stats.tmax_hist, three.stats.tmax_hist);
  // A different seed changes the result.
  c.seed = 78;
  EXPECT_NE(mc::run(c).stats.plus_raw[1].mean, one.stats.plus_raw[1].mean);
}

TEST(Run, BookkeepingInvariants) {
  const mc::McResult r = mc::run(small_config(3000, 300, 5));
  EXPECT_LE(r.stats.max_sum_residual, 1e-12);
  std::uint64_t plus = 0, tmax = 0;
  for (int b = 0; b < mc::kHistogramBins; ++b) {
    plus += r.stats.plus_hist[b];
    tmax += r.stats.tmax_hist[b];
  }
  EXPECT_EQ(plus, 3000u);
  EXPECT_EQ(tmax, 3000u);
  EXPECT_EQ(r.stats.plus_raw[3].n, 3000.0);
  // Powers of a quantity in [0, 1] decrease with the order.
  for (int n = 1; n < mc::kMaxOrder; ++n) {
    EXPECT_LT(r.stats.plus_raw[n + 1].mean, r.stats.plus_raw[n].mean);
    EXPECT_LT(r.stats.tmax_raw[n + 1].mean, r.stats.tmax_raw[n].mean);
  }
}

TEST(Run, ReflectedStartMapsOccupationToComplement) {
  // (x0, v0) -> (-x0, -v0) sends T+ to t - T+; independent seeds, 3 sigma.
  for (auto [x0, v0] : {std::pair{0.3, 0.5}, std::pair{-0.2, 1.0}}) {
    mc::McConfig a = small_config(20000, 200, 101);
    a.x0 = x0;
    a.v0 = v0;
    mc::McConfig b = a;
    b.x0 = -x0;
    b.v0 = -v0;
    b.seed = 202;
    const mc::McEstimate ea = mc::estimate(mc::run(a).stats, mc::Quantity::plus_raw, 1);
    const mc::McEstimate eb = mc::estimate(mc::run(b).stats, mc::Quantity::plus_raw, 1);
    const double sigma = std::hypot(ea.std_err, eb.std_err);
    EXPECT_NEAR(ea.value + eb.value, 1.0, 3.0 * sigma) << x0 << " " << v0;
    // The analytic mean occupation agrees too.
    const double exact = occtime::series::mean_occupation(x0, v0, 1.0).value;
    EXPECT_NEAR(ea.value, exact, 4.0 * ea.std_err + 2e-3) << x0 << " " << v0;
  }
}

TEST(Run, SmallRunMomentsNearReference) {
  const mc::McResult r = mc::run(small_config(20000, 500, 9));
  const mc::McEstimate m1 = mc::estimate(r.stats, mc::Quantity::plus_raw, 1);
  EXPECT_NEAR(m1.value, 0.5, 4.0 * m1.std_err);
  const mc::McEstimate c3 = mc::estimate(r.stats, mc::Quantity::plus_central, 3);
  EXPECT_NEAR(c3.value, 0.0, 4.0 * c3.std_err);
  for (int n = 1; n <= 5; ++n) {
    const mc::McEstimate e = mc::estimate(r.stats, mc::Quantity::tmax_raw, n);
    EXPECT_NEAR(e.value, occtime::tmax::tm_moment(n), std::max(4.0 * e.std_err, 3e-3)) << n;
  }
}
