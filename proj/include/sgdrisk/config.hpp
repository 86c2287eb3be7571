#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "sgdrisk/problem.hpp"

namespace sgdrisk {

struct SpectrumConfig {
  SpectrumKind kind = SpectrumKind::power_law;
  int d = 1;
  SpectrumParams params;
};

/// m0_bias: either an explicit per-coordinate list or the rank-one uniform
/// shorthand (all coordinates r^2 / d).
struct M0Config {
  bool rank_one_uniform = true;
  double r = 1.0;
  std::vector<double> values;
};

struct RunConfig {
  long T = 200;
  long s = 0;
  long N = 100;
  int n_seeds = 200;
  std::uint64_t base_seed = 1;
};

struct SweepConfig {
  std::vector<double> eta_fraction;
  std::vector<int> batch;
  std::vector<long> N;

  bool empty() const {
    return eta_fraction.empty() && batch.empty() && N.empty();
  }
};

struct OutputConfig {
  std::string dir;  // empty: SGDRISK_OUT_DIR or "."
  bool per_coord = false;
};

struct ExperimentConfig {
  SpectrumConfig spectrum;
  double sigma2 = 0.0;
  std::optional<double> eta;
  std::optional<double> eta_fraction;
  int batch = 1;
  M0Config m0_bias;
  RunConfig run;
  SweepConfig sweep;
  OutputConfig output;
};

/// Parses the JSON config file; throws config_error naming the offending
/// field on any problem.
ExperimentConfig load_config_file(const std::string& path);
ExperimentConfig parse_config(const std::string& json_text);

/// Applies a --section.key=value override. Throws config_error for unknown
/// keys or unparseable values.
void apply_override(ExperimentConfig& config, const std::string& dotted_key,
                    const std::string& value);

/// One resolved point of the (possibly swept) experiment grid.
struct GridPoint {
  ProblemSpec spec;
  TailWindow window;
  std::string label;  // "", or e.g. "_b4_f0.5" when sweeping
};

/// Expands the sweep block (cartesian product; empty lists pin the base
/// value) and resolves eta_fraction against each point's own batch size.
std::vector<GridPoint> resolve_grid(const ExperimentConfig& config);

/// Resolves the single (non-sweep) problem spec.
ProblemSpec resolve_spec(const ExperimentConfig& config);

/// Output directory resolution: config value, else SGDRISK_OUT_DIR, else ".".
std::string resolve_out_dir(const ExperimentConfig& config);

}  // namespace sgdrisk
