// Acceptance runner: one PASS/FAIL line per criterion, failing checks listed
// beneath their criterion. Exit status is nonzero if any criterion fails.

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <string>
#include <sys/wait.h>
#include <thread>
#include <vector>

#include "occtime/occtime.hpp"

namespace fs = std::filesystem;
using occtime::validation::Check;

namespace {

struct Criterion {
  int id;
  std::string title;
  std::vector<Check> checks;
  double seconds = 0.0;
};

bool starts_with(const std::string& s, const std::string& prefix) {
  return s.rfind(prefix, 0) == 0;
}

bool contains(const std::string& s, const std::string& part) {
  return s.find(part) != std::string::npos;
}

bool report(const Criterion& c) {
  const bool ok = !c.checks.empty() && occtime::validation::all_passed(c.checks);
  std::printf("%s criterion %d: %s (%zu checks, %.1f s)\n", ok ? "PASS" : "FAIL", c.id,
              c.title.c_str(), c.checks.size(), c.seconds);
  for (const Check& k : c.checks) {
    if (k.passed) continue;
    std::printf("    %s %s / %s: measured %.12g expected %.12g tol %.3g\n",
                k.converged ? "failed" : "not converged", k.suite.c_str(), k.name.c_str(),
                k.measured, k.expected, k.tolerance);
  }
  std::fflush(stdout);
  return ok;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

int run_command(const std::string& cmd) {
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

int main() {
  namespace v = occtime::validation;
  using clock = std::chrono::steady_clock;
  bool all_ok = true;

  // Series checks split between the golden constants and the structural ones.
  Criterion golden{1, "golden constants at the fast tier", {}};
  Criterion identities{2, "identity suite", {}};
  Criterion structure{3, "series structure", {}};
  {
    const auto t0 = clock::now();
    const v::SeriesArtifacts art = v::compute_series_artifacts(occtime::series::Tier::fast);
    for (const Check& c : v::series_suite(art)) {
      if (starts_with(c.name, "int ")) {
        identities.checks.push_back(c);
      } else if (starts_with(c.name, "odd relation") || starts_with(c.name, "e^{pt/2}Q") ||
                 contains(c.name, "s=2 vs s=1") || c.name == "moment table consistent") {
        structure.checks.push_back(c);
      } else {
        golden.checks.push_back(c);
      }
    }
    golden.seconds = seconds_since(t0);
  }
  all_ok &= report(golden);

  {
    const auto t0 = clock::now();
    for (const Check& c : v::basis_suite()) identities.checks.push_back(c);
    for (const Check& c : v::kernel_suite()) identities.checks.push_back(c);
    identities.seconds = seconds_since(t0);
  }
  all_ok &= report(identities);
  all_ok &= report(structure);

  {
    const auto t0 = clock::now();
    Criterion mc{4, "Monte Carlo, 1e6 trajectories x 1000 steps", {}};
    occtime::mc::McConfig cfg;
    cfg.trajectories = 1000000;
    cfg.steps = 1000;
    cfg.workers = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
    mc.checks = v::mc_suite(occtime::mc::run(cfg));
    for (const Check& c : v::propagator_suite()) mc.checks.push_back(c);
    mc.seconds = seconds_since(t0);
    all_ok &= report(mc);
  }

  {
    const auto t0 = clock::now();
    Criterion det{5, "mc report byte-identical for 1 and 4 workers", {}};
    const fs::path dir = fs::temp_directory_path() / "occtime_acceptance";
    fs::create_directories(dir);
    const std::string base = std::string("\"") + OCCTIME_CLI_PATH +
                             "\" --format csv mc --trajectories 200000 --steps 1000 --seed 20240611";
    int rc[2] = {0, 0};
    std::string text[2];
    const int workers[2] = {1, 4};
    for (int i = 0; i < 2; ++i) {
      const fs::path out = dir / ("workers" + std::to_string(workers[i]) + ".csv");
      rc[i] = run_command(base + " --workers " + std::to_string(workers[i]) + " --out \"" +
                          out.string() + "\" 2>/dev/null");
      text[i] = slurp(out);
    }
    fs::remove_all(dir);
    det.checks.push_back(v::make_check("determinism", "exit code workers=1", rc[0], 0.0, 0.0));
    det.checks.push_back(v::make_check("determinism", "exit code workers=4", rc[1], 0.0, 0.0));
    det.checks.push_back(v::make_check("determinism", "report non-empty",
                                       text[0].empty() ? 1.0 : 0.0, 0.0, 0.0));
    det.checks.push_back(v::make_check("determinism", "reports byte-identical",
                                       text[0] == text[1] ? 0.0 : 1.0, 0.0, 0.0));
    det.seconds = seconds_since(t0);
    all_ok &= report(det);
  }

  std::printf("%s\n", all_ok ? "ALL CRITERIA PASS" : "SOME CRITERIA FAIL");
  return all_ok ? EXIT_SUCCESS : EXIT_FAILURE;
}
