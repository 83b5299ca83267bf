// Command-line front end: moment tables, the epsilon constant, identity
// suites and Monte Carlo runs, rendered as csv, json or aligned text.

#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "occtime/occtime.hpp"
#include "report.hpp"

namespace {

using occtime::cli::Format;
using occtime::cli::Report;
using occtime::cli::Row;
using occtime::validation::Check;
using occtime::validation::make_check;

constexpr int kExitPass = 0;
constexpr int kExitFail = 1;
constexpr int kExitNotConverged = 2;
constexpr int kExitBadConfig = 3;

struct Globals {
  std::string tier = "fast";
  std::string format = "pretty";
  std::string out;
};

struct McOptions {
  occtime::mc::McConfig cfg;
  std::string orders = "1..5";
};

occtime::series::Tier parse_tier(const std::string& s) {
  return s == "paper" ? occtime::series::Tier::paper : occtime::series::Tier::fast;
}

Format parse_format(const std::string& s) {
  if (s == "csv") return Format::csv;
  if (s == "json") return Format::json;
  return Format::pretty;
}

// Accepts "a..b", a comma list, or a single order.
std::vector<int> parse_orders(const std::string& text) {
  std::vector<int> out;
  const auto dots = text.find("..");
  try {
    if (dots != std::string::npos) {
      const int lo = std::stoi(text.substr(0, dots));
      const int hi = std::stoi(text.substr(dots + 2));
      for (int n = lo; n <= hi; ++n) out.push_back(n);
    } else {
      std::stringstream ss(text);
      std::string item;
      while (std::getline(ss, item, ',')) out.push_back(std::stoi(item));
    }
  } catch (const std::exception&) {
    throw std::invalid_argument("orders: cannot parse '" + text + "'");
  }
  if (out.empty()) throw std::invalid_argument("orders: empty selection");
  for (int n : out) {
    if (n < 1 || n > occtime::mc::kMaxOrder) {
      throw std::invalid_argument("orders: each order must lie in 1..5");
    }
  }
  return out;
}

std::string num(double x) { return occtime::cli::format_number(x, 15); }

int exit_code(const Report& r) {
  if (!r.converged()) return kExitNotConverged;
  return r.passed() ? kExitPass : kExitFail;
}

void emit(const Report& r, const Globals& g) {
  const std::string text = occtime::cli::render(r, parse_format(g.format));
  if (g.out.empty()) {
    std::cout << text;
    std::cout.flush();
    return;
  }
  std::ofstream f(g.out, std::ios::binary);
  if (!f) throw std::invalid_argument("cannot open output file " + g.out);
  f << text;
  if (!f) throw std::invalid_argument("cannot write output file " + g.out);
}

Row quad_row(std::string name, int n, const occtime::quad::QuadratureResult& q,
             std::string anchor) {
  return {std::move(name), n, q.value, q.err_est, "quadrature", std::move(anchor)};
}

Check converged_check(const std::string& suite, const std::string& name,
                      const occtime::quad::QuadratureResult& q, double tol) {
  return make_check(suite, name + " error estimate", q.err_est, 0.0, tol, q.converged);
}

// ---------------------------------------------------------------------------

Report cmd_moments(const Globals& g) {
  using namespace occtime::series;
  const Tier tier = parse_tier(g.tier);
  const Contributions c = compute_contributions(tier);
  const SeriesTable table = assemble_series(c);
  const MomentTable m = moments(table);
  const SeriesTable closed_table = assemble_series_closed(c.eps.result.value, c.eps.result.err_est);
  const MomentTable cm = moments(closed_table);

  Report r;
  r.command = "moments";
  r.meta = {{"tier", g.tier}};
  for (int n = 0; n <= 5; ++n) {
    r.rows.push_back({"series_coeff", n, table.coeffs[n], table.err[n],
                      to_string(table.provenance[n]), "series_coefficient"});
  }
  for (int n = 1; n <= 5; ++n) {
    r.rows.push_back({"raw_moment", n, m.raw[n], m.raw_err[n], to_string(m.provenance[n]),
                      "moment_raw"});
  }
  r.rows.push_back({"central_moment", 2, m.central2, m.central2_err, "derived", "moment_central"});
  r.rows.push_back({"central_moment", 4, m.central4, m.central4_err, "derived", "moment_central"});
  for (int n = 1; n <= 5; ++n) {
    r.rows.push_back({"raw_moment_closed", n, cm.raw[n], cm.raw_err[n], "closed_form",
                      "moment_raw"});
  }
  r.rows.push_back({"central_moment_closed", 2, cm.central2, cm.central2_err, "closed_form",
                    "moment_central"});
  r.rows.push_back({"central_moment_closed", 4, cm.central4, cm.central4_err, "closed_form",
                    "moment_central"});
  for (int n = 2; n <= 4; ++n) {
    r.rows.push_back({"q0_coeff", n, c.q0.c[n], c.q0.err[n], "quadrature", "q0_coefficient"});
  }
  r.rows.push_back(quad_row("q1_prefactor", -1, c.q1, "q1_prefactor"));
  r.rows.push_back(quad_row("q2_prefactor", -1, c.q2.total, "q2_prefactor"));
  r.rows.push_back({"q2_residual", -1, c.q2.residual, c.q2.residual_err, "quadrature",
                    "q2_cancellation"});
  r.rows.push_back(quad_row("epsilon", -1, c.eps.result, "epsilon"));

  const std::string suite = "moments";
  for (int n = 2; n <= 4; ++n) {
    r.checks.push_back(make_check(suite, "q0 c" + std::to_string(n) + " error estimate",
                                  c.q0.err[n], 0.0, 1e-9, c.q0.converged));
  }
  r.checks.push_back(converged_check(suite, "q1", c.q1, 1e-9));
  r.checks.push_back(converged_check(suite, "q2 one-piece", c.q2.one_piece, 1e-9));
  r.checks.push_back(converged_check(suite, "q2 h-piece", c.q2.h_piece, 1e-9));
  r.checks.push_back(converged_check(suite, "q2 g-piece", c.q2.g_piece, 1e-9));
  r.checks.push_back(converged_check(suite, "epsilon", c.eps.result, 1e-8));
  for (const ConsistencyCheck& cc : m.checks) {
    Check k{suite, cc.name, cc.residual, 0.0, cc.tolerance, true, cc.passed};
    r.checks.push_back(k);
  }
  for (const std::string& flag : table.flags) {
    r.checks.push_back({suite, "closed-form mismatch: " + flag, 1.0, 0.0, 0.0, true, false});
  }
  return r;
}

Report cmd_epsilon(const Globals& g) {
  using namespace occtime::series;
  const Tier tier = parse_tier(g.tier);
  const EpsilonReport e = epsilon_constant(tolerances(tier).epsilon_rel);
  Report r;
  r.command = "epsilon";
  r.meta = {{"tier", g.tier}, {"evaluations", std::to_string(e.result.evaluations)}};
  r.rows.push_back(quad_row("epsilon", -1, e.result, "epsilon"));
  for (const LevelBudget& b : e.budget) {
    r.rows.push_back({"epsilon_level_error", b.level, b.err, 0.0, "quadrature", "epsilon"});
  }
  const double tol = tier == Tier::paper ? 1e-9 : 1e-7;
  r.checks.push_back(
      make_check("epsilon", "epsilon", e.result.value, kEpsilonReference, tol, e.result.converged));
  r.checks.push_back(make_check("epsilon", "epsilon > 0", e.result.value > 0.0 ? 0.0 : 1.0, 0.0,
                                0.0));
  return r;
}

Report cmd_validate(const Globals& g, const std::string& suite) {
  namespace v = occtime::validation;
  Report r;
  r.command = "validate";
  r.meta = {{"suite", suite}, {"tier", g.tier}};
  auto append = [&r](std::vector<Check> checks) {
    r.checks.insert(r.checks.end(), checks.begin(), checks.end());
  };
  if (suite == "basis" || suite == "all") append(v::basis_suite());
  if (suite == "kernel" || suite == "all") append(v::kernel_suite());
  if (suite == "series" || suite == "all") {
    append(v::series_suite(v::compute_series_artifacts(parse_tier(g.tier))));
  }
  return r;
}

// ---------------------------------------------------------------------------

void add_config_meta(Report& r, const occtime::mc::McConfig& cfg) {
  // The worker count is left out on purpose: it must not change the report.
  r.meta = {{"trajectories", std::to_string(cfg.trajectories)},
            {"steps", std::to_string(cfg.steps)},
            {"t", num(cfg.horizon_t)},
            {"x0", num(cfg.x0)},
            {"v0", num(cfg.v0)},
            {"seed", std::to_string(cfg.seed)}};
}

Row mc_row(const std::string& name, const occtime::mc::McEstimate& e, const std::string& anchor) {
  return {name, e.moment_order, e.value, e.std_err, "monte_carlo", anchor};
}

Check z_check(const std::string& name, const occtime::mc::McEstimate& e, double target) {
  const double z = e.std_err > 0.0 ? (e.value - target) / e.std_err : 0.0;
  return make_check("mc", name + " z-score", z, 0.0, 4.0);
}

Report cmd_mc(const McOptions& o) {
  using namespace occtime::mc;
  const std::vector<int> orders = parse_orders(o.orders);
  o.cfg.validate();
  const McResult res = run(o.cfg);
  const bool at_origin = o.cfg.x0 == 0.0 && o.cfg.v0 == 0.0;
  const occtime::validation::McTargets targets = occtime::validation::mc_targets();

  Report r;
  r.command = "mc";
  add_config_meta(r, o.cfg);
  for (int n : orders) {
    const std::string tag = std::to_string(n);
    const McEstimate plus = estimate(res.stats, Quantity::plus_raw, n);
    r.rows.push_back(mc_row("tplus_raw", plus, "moment_raw"));
    if (at_origin) {
      r.rows.push_back({"tplus_raw_analytic", n, targets.plus_raw[n], 0.0, "closed_form",
                        "moment_raw"});
      r.checks.push_back(z_check("T+ raw n=" + tag, plus, targets.plus_raw[n]));
    } else if (n == 1) {
      const occtime::quad::QuadratureResult mean =
          occtime::series::mean_occupation(o.cfg.x0, o.cfg.v0, o.cfg.horizon_t);
      const double target = mean.value / o.cfg.horizon_t;
      r.rows.push_back({"tplus_raw_analytic", 1, target, mean.err_est / o.cfg.horizon_t,
                        "quadrature", "mean_occupation"});
      r.checks.push_back(z_check("T+ raw n=1", plus, target));
    }
    const McEstimate central = estimate(res.stats, Quantity::plus_central, n);
    r.rows.push_back(mc_row("tplus_central", central, "moment_central"));
    if (at_origin && n % 2 == 1) {
      r.checks.push_back(z_check("T+ central n=" + tag, central, 0.0));
    }
    const McEstimate tm = estimate(res.stats, Quantity::tmax_raw, n);
    r.rows.push_back(mc_row("tmax_raw", tm, "tmax_moment"));
    if (at_origin) {
      r.rows.push_back({"tmax_raw_analytic", n, targets.tmax_raw[n], 0.0, "closed_form",
                        "tmax_moment"});
      r.checks.push_back(z_check("T_m raw n=" + tag, tm, targets.tmax_raw[n]));
    }
    r.rows.push_back(
        mc_row("tplus_minus_tmax", estimate(res.stats, Quantity::paired_diff, n), "ordering"));
  }
  r.checks.push_back(make_check("mc", "T+ + T- = t (max residual)", res.stats.max_sum_residual,
                                0.0, 1e-9));
  return r;
}

void write_histograms(const std::string& path, const occtime::mc::McResult& res) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::invalid_argument("cannot open histogram file " + path);
  const double width = 1.0 / occtime::mc::kHistogramBins;
  const double norm = static_cast<double>(res.config.trajectories) * width;
  f << "bin_lo,bin_hi,tplus_density,tmax_density\n";
  for (int b = 0; b < occtime::mc::kHistogramBins; ++b) {
    f << occtime::cli::format_number(b * width, 6) << ','
      << occtime::cli::format_number((b + 1) * width, 6) << ','
      << occtime::cli::format_number(res.stats.plus_hist[b] / norm, 10) << ','
      << occtime::cli::format_number(res.stats.tmax_hist[b] / norm, 10) << '\n';
  }
}

Report cmd_compare(const McOptions& o, const std::string& hist_path) {
  using namespace occtime::mc;
  McConfig cfg = o.cfg;
  cfg.x0 = 0.0;
  cfg.v0 = 0.0;
  cfg.validate();
  const McResult res = run(cfg);
  const occtime::validation::McTargets targets = occtime::validation::mc_targets();

  Report r;
  r.command = "compare";
  add_config_meta(r, cfg);
  r.meta.emplace_back("histograms", hist_path);
  for (int n = 1; n <= kMaxOrder; ++n) {
    const std::string tag = std::to_string(n);
    const McEstimate plus = estimate(res.stats, Quantity::plus_raw, n);
    const McEstimate tm = estimate(res.stats, Quantity::tmax_raw, n);
    const McEstimate diff = estimate(res.stats, Quantity::paired_diff, n);
    r.rows.push_back(mc_row("tplus_raw", plus, "moment_raw"));
    r.rows.push_back({"tplus_raw_analytic", n, targets.plus_raw[n], 0.0, "closed_form",
                      "moment_raw"});
    r.rows.push_back(mc_row("tmax_raw", tm, "tmax_moment"));
    r.rows.push_back({"tmax_raw_analytic", n, targets.tmax_raw[n], 0.0, "closed_form",
                      "tmax_moment"});
    r.rows.push_back(mc_row("tplus_minus_tmax", diff, "ordering"));
    r.checks.push_back(z_check("T+ raw n=" + tag, plus, targets.plus_raw[n]));
    r.checks.push_back(z_check("T_m raw n=" + tag, tm, targets.tmax_raw[n]));
    if (n >= 2) {
      const double gap = targets.plus_raw[n] - targets.tmax_raw[n];
      r.checks.push_back(make_check("compare", "analytic gap n=" + tag + " is negative",
                                    gap < 0.0 ? 0.0 : 1.0, 0.0, 0.0));
      r.checks.push_back(z_check("T+ - T_m raw n=" + tag, diff, gap));
      // Standard errors by which the sample resolves T+ < T_m; informative only.
      const double sigmas = diff.std_err > 0.0 ? -diff.value / diff.std_err : 0.0;
      r.rows.push_back({"ordering_sigmas", n, sigmas, 0.0, "derived", "ordering"});
    }
  }
  write_histograms(hist_path, res);
  return r;
}

void add_mc_options(CLI::App* cmd, McOptions& o, bool full) {
  cmd->add_option("--trajectories", o.cfg.trajectories, "number of trajectories")
      ->capture_default_str();
  cmd->add_option("--steps", o.cfg.steps, "time steps per trajectory (>= 100)")
      ->capture_default_str();
  cmd->add_option("--seed", o.cfg.seed, "Philox key")->capture_default_str();
  cmd->add_option("--workers", o.cfg.workers, "worker threads (does not affect results)")
      ->capture_default_str();
  if (!full) return;
  cmd->add_option("--t", o.cfg.horizon_t, "time horizon")->capture_default_str();
  cmd->add_option("--x0", o.cfg.x0, "initial position")->capture_default_str();
  cmd->add_option("--v0", o.cfg.v0, "initial velocity")->capture_default_str();
  cmd->add_option("--orders", o.orders, "moment orders, e.g. 1..5 or 2,4")->capture_default_str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Occupation-time statistics of the randomly accelerated particle"};
  app.require_subcommand(1);
  app.fallthrough();

  Globals g;
  app.add_option("--tier", g.tier,
                 "tolerance tier: fast (outer rel 1e-10, epsilon rel 1e-7) or "
                 "paper (outer rel 1e-12, epsilon rel 1e-10)")
      ->check(CLI::IsMember({"fast", "paper"}))
      ->capture_default_str();
  app.add_option("--format", g.format, "output format: csv, json or pretty")
      ->check(CLI::IsMember({"csv", "json", "pretty"}))
      ->capture_default_str();
  app.add_option("--out", g.out, "write the report to this path instead of stdout");

  CLI::App* moments = app.add_subcommand("moments", "series coefficients and moment table");
  CLI::App* epsilon = app.add_subcommand("epsilon", "the second-order constant epsilon");
  CLI::App* validate = app.add_subcommand("validate", "run identity suites");
  std::string suite = "all";
  validate->add_option("--suite", suite, "basis, kernel, series or all")
      ->check(CLI::IsMember({"basis", "kernel", "series", "all"}))
      ->capture_default_str();

  McOptions mc_opts;
  mc_opts.cfg.workers = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  CLI::App* mc = app.add_subcommand("mc", "Monte Carlo moments of T+ and T_m");
  add_mc_options(mc, mc_opts, true);

  McOptions cmp_opts;
  cmp_opts.cfg.trajectories = 200000;
  cmp_opts.cfg.workers = mc_opts.cfg.workers;
  std::string hist_path = "histograms.csv";
  CLI::App* compare = app.add_subcommand("compare", "T+ versus T_m moments and histograms");
  add_mc_options(compare, cmp_opts, false);
  compare->add_option("--hist", hist_path, "histogram CSV path")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitPass : kExitBadConfig;
  }

  const auto start = std::chrono::steady_clock::now();
  try {
    Report report;
    if (*moments) report = cmd_moments(g);
    else if (*epsilon) report = cmd_epsilon(g);
    else if (*validate) report = cmd_validate(g, suite);
    else if (*mc) report = cmd_mc(mc_opts);
    else report = cmd_compare(cmp_opts, hist_path);
    emit(report, g);
    const double wall =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::fprintf(stderr, "wall time: %.2f s\n", wall);
    for (const Check& c : report.checks) {
      if (!c.converged) std::fprintf(stderr, "not converged: %s\n", c.name.c_str());
    }
    return exit_code(report);
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "configuration error: %s\n", e.what());
    return kExitBadConfig;
  } catch (const std::domain_error& e) {
    std::fprintf(stderr, "configuration error: %s\n", e.what());
    return kExitBadConfig;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitNotConverged;
  }
}
