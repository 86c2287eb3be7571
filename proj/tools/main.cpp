#include <algorithm>
#include <cmath>
#include <filesystem>
#include <iostream>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>

#include "sgdrisk/bounds.hpp"
#include "sgdrisk/config.hpp"
#include "sgdrisk/engine.hpp"
#include "sgdrisk/errors.hpp"
#include "sgdrisk/io.hpp"
#include "sgdrisk/mc.hpp"
#include "sgdrisk/oracle.hpp"
#include "sgdrisk/rng.hpp"
#include "sgdrisk/validate.hpp"

namespace {

using namespace sgdrisk;

constexpr int kExitOk = 0;
constexpr int kExitVerificationFailure = 1;
constexpr int kExitConfigError = 2;
constexpr int kExitStabilityRefusal = 3;

struct CommandState {
  std::string config_path;
  std::vector<std::pair<std::string, std::string>> overrides;
  int jobs = 1;
  bool allow_unstable = false;
  bool inject_coeff_bug = false;
};

const std::vector<std::string> kOverrideKeys = {
    "spectrum.kind",   "spectrum.d",
    "spectrum.params.a", "spectrum.params.c", "spectrum.params.v",
    "spectrum.params", "sigma2",
    "eta",             "eta_fraction",
    "batch",           "m0_bias",
    "m0_bias.rank_one_uniform",
    "run.T",           "run.s",
    "run.N",           "run.n_seeds",
    "run.base_seed",   "output.dir",
    "output.per_coord"};

void add_common_options(CLI::App* cmd, CommandState& state) {
  cmd->add_option("--config", state.config_path, "experiment config file")
      ->required();
  cmd->add_option("--jobs", state.jobs, "worker pool size")
      ->check(CLI::PositiveNumber);
  for (const auto& key : kOverrideKeys) {
    cmd->add_option_function<std::string>(
        "--" + key,
        [&state, key](const std::string& value) {
          state.overrides.emplace_back(key, value);
        },
        "override config field " + key);
  }
}

ExperimentConfig load_and_override(const CommandState& state) {
  ExperimentConfig config = load_config_file(state.config_path);
  for (const auto& [key, value] : state.overrides) {
    apply_override(config, key, value);
  }
  return config;
}

std::string out_path(const ExperimentConfig& config, const std::string& name) {
  const std::string dir = resolve_out_dir(config);
  std::filesystem::create_directories(dir);
  return (std::filesystem::path(dir) / name).string();
}

void refuse_unstable(const std::vector<GridPoint>& grid, bool allow_unstable) {
  if (allow_unstable) return;
  for (const auto& point : grid) {
    if (!point.spec.stable()) {
      throw stability_error(
          "grid point" + (point.label.empty() ? "" : " " + point.label) +
          " violates eta <= 1/(lambda_max + alpha*tr(H))");
    }
  }
}

// ---------------------------------------------------------------------------

int cmd_evolve(const CommandState& state) {
  const ExperimentConfig config = load_and_override(state);
  const auto grid = resolve_grid(config);
  refuse_unstable(grid, state.allow_unstable);

  for (const auto& point : grid) {
    const Trajectory traj = evolve_split(point.spec, config.run.T);
    std::string csv = "t,excess_risk,bias_excess,variance_excess\n";
    for (const auto& split : traj.states) {
      const double bias = excess_risk_of_m(split.bias, point.spec);
      const double variance = excess_risk_of_m(split.variance, point.spec);
      csv += std::to_string(split.bias.t) + "," + g17(bias + variance) + "," +
             g17(bias) + "," + g17(variance) + "\n";
    }
    write_text_file(out_path(config, "trajectory" + point.label + ".csv"), csv);

    if (config.output.per_coord) {
      std::string coords = "t,k,m_bias,m_var\n";
      for (const auto& split : traj.states) {
        for (Eigen::Index k = 0; k < split.bias.m.size(); ++k) {
          coords += std::to_string(split.bias.t) + "," + std::to_string(k) +
                    "," + g17(split.bias.m[k]) + "," +
                    g17(split.variance.m[k]) + "\n";
        }
      }
      write_text_file(
          out_path(config, "trajectory_coords" + point.label + ".csv"), coords);
    }
  }
  return kExitOk;
}

std::string bias_report_json(const BiasBoundReport& report) {
  JsonBuilder b;
  b.num("term_head", report.term_head)
      .num("term_tail", report.term_tail)
      .num("term_cross", report.term_cross)
      .num("total", report.total)
      .integer("k_star", report.k_star)
      .integer("k_dagger", report.k_dagger)
      .boolean("stable", report.stable);
  return b.build();
}

std::string variance_report_json(const VarianceBoundReport& report) {
  JsonBuilder b;
  b.num("band_head", report.band_head)
      .num("band_mid", report.band_mid)
      .num("band_tail", report.band_tail)
      .num("prefactor", report.prefactor)
      .num("total", report.total)
      .integer("k_star", report.k_star)
      .integer("k_dagger", report.k_dagger)
      .boolean("stable", report.stable);
  return b.build();
}

std::string lower_report_json(const LowerBoundReport& report) {
  JsonBuilder b;
  b.num("bias_lb", report.bias_lb)
      .num("variance_lb", report.variance_lb)
      .boolean("diagnostic_only", report.diagnostic_only)
      .integer("k_star", report.k_star)
      .integer("k_dagger", report.k_dagger)
      .boolean("stable", report.stable);
  return b.build();
}

int cmd_bounds(const CommandState& state) {
  const ExperimentConfig config = load_and_override(state);
  const auto grid = resolve_grid(config);
  refuse_unstable(grid, false);

  for (const auto& point : grid) {
    const ProblemSpec& spec = point.spec;
    const TailWindow window = point.window;
    const Thresholds th = thresholds(spec.spectrum(), spec.eta(), window);
    const BiasBoundReport bias = bias_risk_bound(spec, window);
    const VarianceBoundReport variance = variance_risk_bound(spec, window);
    const LowerBoundReport lower = lower_bound_diagnostic(spec, window);
    const TailExcessParts exact = tail_excess_parts(spec, window);
    const double upper_total = bias.total + variance.total;

    JsonBuilder exact_json;
    exact_json.num("tail_excess", exact.total())
        .num("tail_excess_bias", exact.bias)
        .num("tail_excess_variance", exact.variance)
        .num("tail_excess_bound", exact.bound_excess)
        .num("tail_risk", exact.total() + 0.5 * spec.sigma2());

    JsonBuilder sandwich;
    sandwich.num("upper_total", upper_total)
        .boolean("holds", exact.total() <= upper_total + 1e-12)
        .num("slack", upper_total - exact.total());

    JsonBuilder root;
    root.str("generated_at", iso8601_now())
        .integer("d", spec.dim())
        .num("sigma2", spec.sigma2())
        .num("eta", spec.eta())
        .integer("batch", spec.batch())
        .integer("s", window.s)
        .integer("N", window.N)
        .integer("k_star", th.k_star)
        .integer("k_dagger", th.k_dagger)
        .boolean("stable", spec.stable())
        .raw("bias_bound", bias_report_json(bias))
        .raw("variance_bound", variance_report_json(variance))
        .raw("lower_bound", lower_report_json(lower))
        .raw("exact", exact_json.build())
        .raw("sandwich", sandwich.build());
    write_text_file(out_path(config, "bounds" + point.label + ".json"),
                    root.build() + "\n");
  }
  return kExitOk;
}

int cmd_tail_risk(const CommandState& state) {
  const ExperimentConfig config = load_and_override(state);
  const auto grid = resolve_grid(config);
  refuse_unstable(grid, state.allow_unstable);

  for (const auto& point : grid) {
    const ProblemSpec& spec = point.spec;
    const TailExcessParts exact = tail_excess_parts(spec, point.window);
    JsonBuilder root;
    root.str("generated_at", iso8601_now())
        .integer("s", point.window.s)
        .integer("N", point.window.N)
        .num("tail_risk_exact", exact.total() + 0.5 * spec.sigma2())
        .num("tail_excess_exact", exact.total())
        .num("tail_excess_bias", exact.bias)
        .num("tail_excess_variance", exact.variance)
        .boolean("stable", spec.stable());
    if (spec.stable()) {
      root.num("tail_risk_bound", exact.bound_excess + 0.5 * spec.sigma2())
          .num("tail_excess_bound", exact.bound_excess);
    }
    write_text_file(out_path(config, "tail_risk" + point.label + ".json"),
                    root.build() + "\n");
  }
  return kExitOk;
}

int cmd_mc(const CommandState& state) {
  const ExperimentConfig config = load_and_override(state);
  const auto grid = resolve_grid(config);

  for (const auto& point : grid) {
    const ProblemSpec& spec = point.spec;
    const long T = std::max(config.run.T, point.window.s + point.window.N);
    const McProblem problem(spec.spectrum(), spec.m0_bias().sqrt(),
                            spec.sigma2(), spec.eta(), spec.batch());
    const auto paths = mc_paths(problem, config.run.n_seeds, T, point.window,
                                config.run.base_seed, state.jobs);

    std::string csv = "seed,final_excess,tail_avg_excess\n";
    for (size_t i = 0; i < paths.size(); ++i) {
      csv += std::to_string(config.run.base_seed + i) + "," +
             g17(paths[i].final_excess) + "," + g17(paths[i].tail_avg_excess) +
             "\n";
    }
    write_text_file(out_path(config, "mc" + point.label + ".csv"), csv);

    double sum = 0.0;
    for (const auto& p : paths) sum += p.tail_avg_excess;
    const double mean = sum / static_cast<double>(paths.size());
    double sq = 0.0;
    for (const auto& p : paths) {
      sq += (p.tail_avg_excess - mean) * (p.tail_avg_excess - mean);
    }
    const double std_error = std::sqrt(
        std::max(0.0, sq / static_cast<double>(paths.size() - 1)) /
        static_cast<double>(paths.size()));

    JsonBuilder root;
    root.str("generated_at", iso8601_now())
        .num("mean", mean)
        .num("std_error", std_error)
        .integer("n_seeds", config.run.n_seeds)
        .uinteger("base_seed", config.run.base_seed)
        .integer("T", T)
        .integer("s", point.window.s)
        .integer("N", point.window.N)
        .str("rng_id", kRngId);
    write_text_file(out_path(config, "mc_summary" + point.label + ".json"),
                    root.build() + "\n");
  }
  return kExitOk;
}

int cmd_validate(const CommandState& state) {
  const ExperimentConfig config = load_and_override(state);
  ValidateOptions options;
  options.inject_coeff_bug = state.inject_coeff_bug;
  options.jobs = state.jobs;
  const ValidateResult result = run_validation(config, options);

  std::string log;
  for (const auto& verdict : result.verdicts) {
    log += verdict_to_json_line(verdict) + "\n";
  }
  write_text_file(out_path(config, "verdicts.jsonl"), log);

  int hard_total = 0, hard_passed = 0;
  for (const auto& verdict : result.verdicts) {
    if (!verdict.hard) continue;
    ++hard_total;
    if (verdict.holds) ++hard_passed;
  }
  std::cout << "validate: " << hard_passed << "/" << hard_total
            << " hard checks passed, " << result.verdicts.size()
            << " verdicts written\n";
  if (!result.all_hard_passed) {
    for (const auto& verdict : result.verdicts) {
      if (verdict.hard && !verdict.holds) {
        std::cout << "first failing verdict: " << verdict_to_json_line(verdict)
                  << "\n";
        break;
      }
    }
    return kExitVerificationFailure;
  }
  return kExitOk;
}

int cmd_sweep(const CommandState& state) {
  const ExperimentConfig config = load_and_override(state);
  const auto grid = resolve_grid(config);
  refuse_unstable(grid, state.allow_unstable);

  std::string csv =
      "label,eta,batch,s,N,k_star,k_dagger,stable,exact_excess,bias_excess,"
      "variance_excess,bias_bound,variance_bound,upper_total,tail_excess_"
      "bound\n";
  for (const auto& point : grid) {
    const ProblemSpec& spec = point.spec;
    const TailWindow window = point.window;
    const Thresholds th = thresholds(spec.spectrum(), spec.eta(), window);
    const TailExcessParts exact = tail_excess_parts(spec, window);
    std::string bias_total = "nan", variance_total = "nan", upper = "nan";
    if (spec.stable()) {
      const BiasBoundReport bias = bias_risk_bound(spec, window);
      const VarianceBoundReport variance = variance_risk_bound(spec, window);
      bias_total = g17(bias.total);
      variance_total = g17(variance.total);
      upper = g17(bias.total + variance.total);
    }
    csv += (point.label.empty() ? "base" : point.label.substr(1)) + "," +
           g17(spec.eta()) + "," + std::to_string(spec.batch()) + "," +
           std::to_string(window.s) + "," + std::to_string(window.N) + "," +
           std::to_string(th.k_star) + "," + std::to_string(th.k_dagger) +
           "," + (spec.stable() ? "true" : "false") + "," +
           g17(exact.total()) + "," + g17(exact.bias) + "," +
           g17(exact.variance) + "," + bias_total + "," + variance_total +
           "," + upper + "," + g17(exact.bound_excess) + "\n";
  }
  write_text_file(out_path(config, "sweep.csv"), csv);
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Exact risk trajectories, closed-form bias/variance bounds, and Monte "
      "Carlo certification for constant-step-size SGD on Gaussian linear "
      "regression"};
  app.require_subcommand(1);

  CommandState evolve_state, bounds_state, tail_state, mc_state,
      validate_state, sweep_state;

  auto* evolve = app.add_subcommand("evolve", "write exact risk trajectories");
  add_common_options(evolve, evolve_state);
  evolve->add_flag("--allow-unstable", evolve_state.allow_unstable,
                   "evolve unstable specs (divergence demos)");

  auto* bounds = app.add_subcommand("bounds", "write closed-form bound reports");
  add_common_options(bounds, bounds_state);

  auto* tail = app.add_subcommand("tail-risk",
                                  "write exact and bound tail-averaged risk");
  add_common_options(tail, tail_state);
  tail->add_flag("--allow-unstable", tail_state.allow_unstable,
                 "compute exact tail risk for unstable specs");

  auto* mc = app.add_subcommand("mc", "run the Monte Carlo simulator");
  add_common_options(mc, mc_state);

  auto* validate =
      app.add_subcommand("validate", "run the full invariant suite");
  add_common_options(validate, validate_state);
  validate->add_flag("--inject-coeff-bug", validate_state.inject_coeff_bug,
                     "negative control: corrupt a recursion coefficient");

  auto* sweep = app.add_subcommand("sweep", "summary CSV over the sweep grid");
  add_common_options(sweep, sweep_state);
  sweep->add_flag("--allow-unstable", sweep_state.allow_unstable,
                  "include unstable grid points");

  CLI11_PARSE(app, argc, argv);

  try {
    if (evolve->parsed()) return cmd_evolve(evolve_state);
    if (bounds->parsed()) return cmd_bounds(bounds_state);
    if (tail->parsed()) return cmd_tail_risk(tail_state);
    if (mc->parsed()) return cmd_mc(mc_state);
    if (validate->parsed()) return cmd_validate(validate_state);
    if (sweep->parsed()) return cmd_sweep(sweep_state);
  } catch (const config_error& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfigError;
  } catch (const stability_error& e) {
    std::cerr << "stability refusal: " << e.what() << "\n";
    return kExitStabilityRefusal;
  } catch (const degenerate_error& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfigError;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitVerificationFailure;
  }
  return kExitOk;
}
