// Acceptance suite: one pass/fail line per criterion, exit 1 if any hard
// criterion fails. argv[1] = CLI binary, argv[2] = bundled default config.

#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "sgdrisk/bounds.hpp"
#include "sgdrisk/engine.hpp"
#include "sgdrisk/mc.hpp"
#include "sgdrisk/oracle.hpp"
#include "sgdrisk/rng.hpp"
#include "testutil.hpp"

namespace fs = std::filesystem;
using namespace sgdrisk;
using Clock = std::chrono::steady_clock;

namespace {

int g_failures = 0;
std::string g_cli_path;
std::string g_config_path;

double elapsed_s(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

void report(int index, bool pass, const std::string& name,
            const std::string& detail, double seconds) {
  std::printf("[%s] criterion %d: %s (%s, %.2fs)\n", pass ? "PASS" : "FAIL",
              index, name.c_str(), detail.c_str(), seconds);
  std::fflush(stdout);
  if (!pass) ++g_failures;
}

Mat random_psd(CounterRng& rng, int d) {
  Mat g(d, d);
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) g(i, j) = rng.next_gaussian();
  }
  return g * g.transpose() / static_cast<double>(d);
}

// --- criterion 1: diagonal equivalence --------------------------------------

void criterion_1() {
  const auto start = Clock::now();
  CounterRng rng(1001);
  testutil::SpecOptions opt;
  opt.dims = {1, 2, 4, 8};
  opt.batches = {1, 2, 4};

  double max_err = 0.0;
  for (int trial = 0; trial < 50; ++trial) {
    const auto spec = testutil::random_stable_spec(rng, opt);
    const Mat M0 = spec.m0_bias().matrix().asDiagonal();
    const Mat diags = full_matrix_diag_trajectory(spec, M0, 100);
    StateVector state{spec.m0_bias(), 0};
    for (long t = 0; t <= 100; ++t) {
      for (int k = 0; k < spec.dim(); ++k) {
        const double ref = diags(t, k);
        const double denom =
            std::max({std::abs(ref), std::abs(state.m[k]), 1e-30});
        max_err = std::max(max_err, std::abs(ref - state.m[k]) / denom);
      }
      if (t < 100) state = step_m(state, spec);
    }
  }
  char detail[128];
  std::snprintf(detail, sizeof(detail), "50 specs, t<=100, max_rel_err=%.3g",
                max_err);
  report(1, max_err <= 1e-10, "diagonal equivalence", detail,
         elapsed_s(start));
}

// --- criterion 2: Monte Carlo consistency ------------------------------------

void criterion_2() {
  const auto start = Clock::now();
  CounterRng rng(1002);
  testutil::SpecOptions opt;
  opt.dims = {1, 2, 3, 4};
  opt.batches = {1, 2};
  opt.min_fraction = 0.2;
  opt.max_fraction = 0.8;

  const std::vector<TailWindow> windows = {
      TailWindow(0, 50), TailWindow(25, 50), TailWindow(50, 100),
      TailWindow(100, 50)};
  const long T = 150;
  const int n_seeds = 1000;

  long cells = 0, cells_within = 0;
  int tail_ok = 0;
  for (int i = 0; i < 10; ++i) {
    auto spec = testutil::random_stable_spec(rng, opt);
    spec = spec.with_sigma2(0.05 + 0.45 * rng.next_unit());
    const TailWindow window = windows[static_cast<size_t>(i) % windows.size()];

    Vec delta0(spec.dim());
    for (int j = 0; j < spec.dim(); ++j) {
      delta0[j] = (j % 2 == 0 ? 1.0 : -1.0) * std::sqrt(spec.m0_bias()[j]);
    }
    const McProblem problem(spec.spectrum(), delta0, spec.sigma2(), spec.eta(),
                            spec.batch());
    const std::uint64_t seed = 3000 + 1000 * static_cast<std::uint64_t>(i);

    const Trajectory traj = evolve_split(spec, T);
    Mat mean, se;
    mc_second_moments(problem, n_seeds, T, seed, mean, se);
    for (long t = 0; t <= T; ++t) {
      const Vec exact = traj.states[static_cast<size_t>(t)].total();
      for (int k = 0; k < spec.dim(); ++k) {
        ++cells;
        if (std::abs(mean(t, k) - exact[k]) <= 3.0 * se(t, k)) ++cells_within;
      }
    }

    const double exact_tail =
        tail_risk_exact(traj, window) - 0.5 * spec.sigma2();
    const McEstimate estimate =
        mc_estimate(problem, n_seeds, T, window, seed + 500);
    if (std::abs(estimate.mean - exact_tail) <= 3.0 * estimate.std_error) {
      ++tail_ok;
    }
  }

  const double cell_rate =
      static_cast<double>(cells_within) / static_cast<double>(cells);
  char detail[160];
  std::snprintf(detail, sizeof(detail),
                "cells within 3se: %.1f%% (need >=95%%), tail 3se: %d/10 "
                "(need >=9)",
                100.0 * cell_rate, tail_ok);
  report(2, cell_rate >= 0.95 && tail_ok >= 9, "Monte Carlo consistency",
         detail, elapsed_s(start));
}

// --- criterion 3: fourth-moment certificate ----------------------------------

void criterion_3() {
  const auto start = Clock::now();
  CounterRng rng(1003);
  const Spectrum spectrum = power_law_spectrum(3, 0.5, 1.0);
  const Mat Sigma = random_psd(rng, 3);
  const std::vector<long> snapshots = {10000, 100000, 1000000};

  const int reps = 5;
  std::vector<double> mean_err(snapshots.size(), 0.0);
  double worst_final = 0.0;
  for (int rep = 0; rep < reps; ++rep) {
    const auto results =
        isserlis_check_snapshots(spectrum, Sigma, snapshots, 42 + rep);
    for (size_t i = 0; i < results.size(); ++i) {
      mean_err[i] += results[i].max_rel_err / reps;
    }
    worst_final = std::max(worst_final, results.back().max_rel_err);
  }

  // Least-squares slope of log(err) vs log(n).
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (size_t i = 0; i < snapshots.size(); ++i) {
    const double x = std::log(static_cast<double>(snapshots[i]));
    const double y = std::log(mean_err[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double n = static_cast<double>(snapshots.size());
  const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);

  char detail[160];
  std::snprintf(detail, sizeof(detail),
                "err(1e6) worst=%.4f (need <=0.05), slope=%.3f (need -0.5 "
                "+/- 0.15)",
                worst_final, slope);
  report(3, worst_final <= 0.05 && slope >= -0.65 && slope <= -0.35,
         "fourth-moment certificate", detail, elapsed_s(start));
}

// --- criteria 4 and 5: bound sandwich and iterate domination ------------------

struct GridEntry {
  ProblemSpec spec;
  TailWindow window;
};

std::vector<GridEntry> acceptance_grid() {
  std::vector<GridEntry> grid;
  const std::vector<int> dims = {2, 4, 8, 16, 32, 64};
  const std::vector<double> exponents = {0.8, 1.3};
  const std::vector<double> fractions = {0.25, 0.5, 1.0};
  const std::vector<int> batches = {1, 4};
  const std::vector<TailWindow> windows = {
      TailWindow(0, 10), TailWindow(100, 100), TailWindow(1000, 1000)};

  int index = 0;
  for (int d : dims) {
    for (double a : exponents) {
      const Spectrum spectrum = power_law_spectrum(d, a, 1.0);
      for (double fraction : fractions) {
        for (int b : batches) {
          for (const auto& window : windows) {
            if (grid.size() >= 200) return grid;
            const double sigma2 = (index % 2 == 0) ? 0.25 : 1.0;
            const double r = ((index / 2) % 2 == 0) ? 1.0 : 2.0;
            const double eta =
                fraction * max_stable_lr(spectrum, 2.0 / b);
            grid.push_back(GridEntry{
                ProblemSpec(spectrum, sigma2, eta, b,
                            Vec::Constant(d, r * r / d)),
                window});
            ++index;
          }
        }
      }
    }
  }
  return grid;
}

void criterion_4(const std::vector<GridEntry>& grid) {
  const auto start = Clock::now();
  int violations = 0;
  double min_slack = 1e300;
  for (const auto& entry : grid) {
    const TailExcessParts exact = tail_excess_parts(entry.spec, entry.window);
    const double upper = bias_risk_bound(entry.spec, entry.window).total +
                         variance_risk_bound(entry.spec, entry.window).total;
    const double slack = upper - exact.total();
    min_slack = std::min(min_slack, slack);
    if (exact.total() > upper + 1e-12) ++violations;
  }
  char detail[160];
  std::snprintf(detail, sizeof(detail),
                "%zu grid points, violations=%d, min slack=%.3g", grid.size(),
                violations, min_slack);
  report(4, violations == 0, "bound sandwich", detail, elapsed_s(start));
}

void criterion_5(const std::vector<GridEntry>& grid) {
  const auto start = Clock::now();
  int violations = 0;
  double worst = 0.0;
  for (const auto& entry : grid) {
    const Trajectory traj = evolve_split(entry.spec, 200);
    for (long t = 0; t <= 200; ++t) {
      const Vec bias_bound = bias_iterate_bound(entry.spec, t);
      const Vec var_bound = variance_iterate_bound(entry.spec, t);
      const auto& state = traj.states[static_cast<size_t>(t)];
      const double v =
          std::max((state.bias.m - bias_bound).maxCoeff(),
                   (state.variance.m - var_bound).maxCoeff());
      worst = std::max(worst, v);
      if (v > 1e-12) ++violations;
    }
  }
  char detail[128];
  std::snprintf(detail, sizeof(detail),
                "%zu specs, t<=200, violations=%d, worst excess=%.3g",
                grid.size(), violations, worst);
  report(5, violations == 0, "iterate-bound domination", detail,
         elapsed_s(start));
}

// --- criterion 6: operator inequalities ----------------------------------------------

void criterion_6() {
  const auto start = Clock::now();
  CounterRng rng(1006);
  testutil::SpecOptions opt;
  opt.batches = {1, 2, 4, 8, 64};

  int dominance_fail = 0, resolvent_fail = 0;
  for (int trial = 0; trial < 100; ++trial) {
    if (!dominance_check(testutil::random_stable_spec(rng, opt))) {
      ++dominance_fail;
    }
  }
  for (int trial = 0; trial < 100; ++trial) {
    if (!resolvent_bound_check(testutil::random_stable_spec(rng, opt)).holds) {
      ++resolvent_fail;
    }
  }
  char detail[128];
  std::snprintf(detail, sizeof(detail),
                "dominance failures=%d/100, resolvent failures=%d/100",
                dominance_fail, resolvent_fail);
  report(6, dominance_fail == 0 && resolvent_fail == 0, "operator inequalities",
         detail, elapsed_s(start));
}

// --- criterion 7: auxiliary certificates ---------------------------------------------

void criterion_7() {
  const auto start = Clock::now();
  CounterRng rng(1007);
  int coupling_fail = 0, mass_fail = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const auto spec = testutil::random_stable_spec(rng);
    const CouplingSumCheck check = coupling_sum_check(spec, 100);
    if (check.lhs > check.rhs + 1e-12) ++coupling_fail;

    const TailWindow window = testutil::random_window(rng, 100, 100);
    const long horizon = window.s + window.N;
    const Trajectory traj = evolve_split(spec.with_sigma2(0.0), horizon);
    const double lhs =
        (traj.states.front().bias.m - traj.states.back().bias.m).sum();
    double rhs = 0.0;
    for (int k = 0; k < spec.dim(); ++k) {
      rhs += spec.m0_bias()[k] *
             (1.0 - std::pow(1.0 - spec.eta() * spec.spectrum()[k],
                             2.0 * horizon));
    }
    if (lhs > rhs + 1e-12) ++mass_fail;
  }
  char detail[128];
  std::snprintf(detail, sizeof(detail),
                "coupling-sum failures=%d/100, mass-drop failures=%d/100",
                coupling_fail, mass_fail);
  report(7, coupling_fail == 0 && mass_fail == 0, "auxiliary certificates", detail,
         elapsed_s(start));
}

// --- criterion 8: batch-size behavior ------------------------------------------

void criterion_8() {
  const auto start = Clock::now();
  const Spectrum spectrum = power_law_spectrum(16, 1.0, 1.0);
  const double eta = 0.5 * max_stable_lr(spectrum, 2.0);
  const Vec m0 = Vec::Zero(16);

  auto fixed_point_excess = [&](int b) {
    const ProblemSpec spec(spectrum, 1.0, eta, b, m0);
    const TransitionOperators ops = build_operators(spec);
    const Mat system = Mat::Identity(16, 16) - ops.exact;
    const Eigen::VectorXd noise =
        (eta * eta / b) * spectrum.values().matrix();
    return spectrum.values().matrix().dot(
        Eigen::VectorXd(system.partialPivLu().solve(noise)));
  };

  const double base = fixed_point_excess(1);
  bool decreasing = true, ratio_ok = true;
  double prev = base;
  std::string ratios;
  for (int b : {2, 4, 8, 64}) {
    const double cur = fixed_point_excess(b);
    if (cur >= prev) decreasing = false;
    const double ratio = cur / base;
    if (ratio < 1.0 / (2.0 * b) || ratio > 2.0 / b) ratio_ok = false;
    char buf[48];
    std::snprintf(buf, sizeof(buf), " b=%d:%.4f*b1", b, ratio);
    ratios += buf;
    prev = cur;
  }
  char detail[192];
  std::snprintf(detail, sizeof(detail),
                "fixed-point excess strictly decreasing=%s, ratios in "
                "[1/2b,2/b]=%s,%s",
                decreasing ? "yes" : "no", ratio_ok ? "yes" : "no",
                ratios.c_str());
  report(8, decreasing && ratio_ok, "batch-size behavior", detail,
         elapsed_s(start));
}

// --- criterion 9: non-sharpness observation (report-only) ----------------------

void criterion_9() {
  const auto start = Clock::now();
  const int d = 1000;
  const Spectrum spectrum = power_law_spectrum(d, 1.0, 1.0);
  const double eta = 0.5 * max_stable_lr(spectrum, 2.0);
  const ProblemSpec spec(spectrum, 1.0, eta, 1,
                         Vec::Constant(d, 1.0 / static_cast<double>(d)));
  const TailWindow window(10000, 10000);

  const Thresholds th = thresholds(spectrum, eta, window);
  const BiasBoundReport bias = bias_risk_bound(spec, window);
  const VarianceBoundReport variance = variance_risk_bound(spec, window);
  const LowerBoundReport lower = lower_bound_diagnostic(spec, window);
  const double upper = bias.total + variance.total;
  const double lb = lower.bias_lb + lower.variance_lb;

  double head_mass = 0.0, tail_weighted = 0.0;
  for (int j = 0; j < d; ++j) {
    if (j < th.k_star) {
      head_mass += spec.m0_bias()[j];
    } else {
      tail_weighted += spectrum[j] * spec.m0_bias()[j];
    }
  }
  const double gap_share =
      head_mass /
      (head_mass + 2.0 * (window.s + window.N) * eta * tail_weighted);

  char detail[224];
  std::snprintf(detail, sizeof(detail),
                "report-only: k*=%d, lower=%.4g, upper=%.4g, lower<upper=%s, "
                "head-mass share of cross term=%.1f%% (>10%%: %s)",
                th.k_star, lb, upper, lb < upper ? "yes" : "no",
                100.0 * gap_share, gap_share > 0.10 ? "yes" : "no");
  report(9, true, "non-sharpness observation", detail, elapsed_s(start));
}

// --- criterion 10: CLI determinism ----------------------------------------------

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return "<missing:" + path + ">";
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int run_quiet(const std::string& cmd) {
  const int status = std::system((cmd + " > /dev/null 2>&1").c_str());
  return (status != -1 && WIFEXITED(status)) ? WEXITSTATUS(status) : -1;
}

void criterion_10() {
  const auto start = Clock::now();
  const fs::path tmp = fs::temp_directory_path() /
                       ("sgdrisk_accept_" + std::to_string(::getpid()));
  fs::remove_all(tmp);
  fs::create_directories(tmp);

  const std::string d1 = (tmp / "run1").string();
  const std::string d2 = (tmp / "run2").string();
  const int rc1 = run_quiet(g_cli_path + " validate --config " +
                            g_config_path + " --output.dir " + d1);
  const int rc2 = run_quiet(g_cli_path + " validate --config " +
                            g_config_path + " --output.dir " + d2);
  const std::string log1 = slurp(d1 + "/verdicts.jsonl");
  const std::string log2 = slurp(d2 + "/verdicts.jsonl");
  const bool identical = !log1.empty() && log1 == log2;
  const long lines = std::count(log1.begin(), log1.end(), '\n');

  char detail[160];
  std::snprintf(detail, sizeof(detail),
                "exit codes %d/%d (need 0), %ld verdicts, logs identical=%s",
                rc1, rc2, lines, identical ? "yes" : "no");
  report(10, rc1 == 0 && rc2 == 0 && identical, "validate determinism",
         detail, elapsed_s(start));
  fs::remove_all(tmp);
}

}  // namespace

int main(int argc, char** argv) {
  if (argc < 3) {
    std::fprintf(stderr, "usage: %s <cli-binary> <default-config>\n", argv[0]);
    return 2;
  }
  g_cli_path = argv[1];
  g_config_path = argv[2];

  criterion_1();
  criterion_2();
  criterion_3();
  const auto grid = acceptance_grid();
  criterion_4(grid);
  criterion_5(grid);
  criterion_6();
  criterion_7();
  criterion_8();
  criterion_9();
  criterion_10();

  if (g_failures > 0) {
    std::printf("acceptance: %d criterion(s) FAILED\n", g_failures);
    return 1;
  }
  std::printf("acceptance: all criteria passed\n");
  return 0;
}
