#include "sgdrisk/config.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "sgdrisk/errors.hpp"
#include "sgdrisk/io.hpp"

namespace sgdrisk {

namespace {

using nlohmann::json;

double as_number(const json& j, const std::string& field) {
  if (!j.is_number()) throw config_error(field, "expected a number");
  return j.get<double>();
}

long as_integer(const json& j, const std::string& field) {
  if (!j.is_number_integer()) throw config_error(field, "expected an integer");
  return j.get<long>();
}

std::vector<double> as_number_list(const json& j, const std::string& field) {
  if (!j.is_array()) throw config_error(field, "expected a list of numbers");
  std::vector<double> out;
  out.reserve(j.size());
  for (const auto& v : j) {
    if (!v.is_number()) throw config_error(field, "expected a list of numbers");
    out.push_back(v.get<double>());
  }
  return out;
}

SpectrumConfig parse_spectrum(const json& j) {
  if (!j.is_object()) throw config_error("spectrum", "expected an object");
  SpectrumConfig out;
  if (!j.contains("kind")) throw config_error("spectrum.kind", "missing");
  if (!j.at("kind").is_string()) {
    throw config_error("spectrum.kind", "expected a string");
  }
  try {
    out.kind = spectrum_kind_from_string(j.at("kind").get<std::string>());
  } catch (const std::invalid_argument& e) {
    throw config_error("spectrum.kind", e.what());
  }
  if (!j.contains("d")) throw config_error("spectrum.d", "missing");
  out.d = static_cast<int>(as_integer(j.at("d"), "spectrum.d"));
  if (out.d < 1) throw config_error("spectrum.d", "must be >= 1");

  const json params = j.value("params", json::object());
  switch (out.kind) {
    case SpectrumKind::power_law:
      out.params.exponent =
          params.contains("a") ? as_number(params.at("a"), "spectrum.params.a")
                               : 1.0;
      out.params.scale =
          params.contains("c") ? as_number(params.at("c"), "spectrum.params.c")
                               : 1.0;
      break;
    case SpectrumKind::uniform:
      out.params.value =
          params.contains("v") ? as_number(params.at("v"), "spectrum.params.v")
                               : 0.0;
      break;
    case SpectrumKind::explicit_list:
      if (!params.is_array()) {
        throw config_error("spectrum.params",
                           "explicit spectrum needs a list of eigenvalues");
      }
      out.params.values = as_number_list(params, "spectrum.params");
      break;
  }
  return out;
}

M0Config parse_m0(const json& j) {
  M0Config out;
  if (j.is_array()) {
    out.rank_one_uniform = false;
    out.values = as_number_list(j, "m0_bias");
    return out;
  }
  if (j.is_object() && j.contains("rank_one_uniform")) {
    out.rank_one_uniform = true;
    out.r = as_number(j.at("rank_one_uniform"), "m0_bias.rank_one_uniform");
    return out;
  }
  throw config_error("m0_bias",
                     "expected a list or {\"rank_one_uniform\": r}");
}

}  // namespace

ExperimentConfig parse_config(const std::string& json_text) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw config_error("<root>", std::string("invalid JSON: ") + e.what());
  }
  if (!root.is_object()) throw config_error("<root>", "expected an object");

  ExperimentConfig config;
  if (!root.contains("spectrum")) throw config_error("spectrum", "missing");
  config.spectrum = parse_spectrum(root.at("spectrum"));

  if (root.contains("sigma2")) {
    config.sigma2 = as_number(root.at("sigma2"), "sigma2");
    if (config.sigma2 < 0) throw config_error("sigma2", "must be >= 0");
  }
  if (root.contains("eta")) config.eta = as_number(root.at("eta"), "eta");
  if (root.contains("eta_fraction")) {
    config.eta_fraction = as_number(root.at("eta_fraction"), "eta_fraction");
  }
  if (config.eta && config.eta_fraction) {
    throw config_error("eta", "give either eta or eta_fraction, not both");
  }
  if (!config.eta && !config.eta_fraction) {
    throw config_error("eta", "one of eta or eta_fraction is required");
  }
  if (root.contains("batch")) {
    config.batch = static_cast<int>(as_integer(root.at("batch"), "batch"));
    if (config.batch < 1) throw config_error("batch", "must be >= 1");
  }
  if (root.contains("m0_bias")) {
    config.m0_bias = parse_m0(root.at("m0_bias"));
  }

  if (root.contains("run")) {
    const json& run = root.at("run");
    if (!run.is_object()) throw config_error("run", "expected an object");
    if (run.contains("T")) config.run.T = as_integer(run.at("T"), "run.T");
    if (run.contains("s")) config.run.s = as_integer(run.at("s"), "run.s");
    if (run.contains("N")) config.run.N = as_integer(run.at("N"), "run.N");
    if (run.contains("n_seeds")) {
      config.run.n_seeds =
          static_cast<int>(as_integer(run.at("n_seeds"), "run.n_seeds"));
    }
    if (run.contains("base_seed")) {
      config.run.base_seed = static_cast<std::uint64_t>(
          as_integer(run.at("base_seed"), "run.base_seed"));
    }
    if (config.run.T < 0) throw config_error("run.T", "must be >= 0");
    if (config.run.s < 0) throw config_error("run.s", "must be >= 0");
    if (config.run.N < 1) throw config_error("run.N", "must be >= 1");
    if (config.run.n_seeds < 2) throw config_error("run.n_seeds", "must be >= 2");
  }

  if (root.contains("sweep")) {
    const json& sweep = root.at("sweep");
    if (!sweep.is_object()) throw config_error("sweep", "expected an object");
    if (sweep.contains("eta_fraction")) {
      config.sweep.eta_fraction =
          as_number_list(sweep.at("eta_fraction"), "sweep.eta_fraction");
    }
    if (sweep.contains("batch")) {
      for (double b : as_number_list(sweep.at("batch"), "sweep.batch")) {
        if (b < 1 || b != std::floor(b)) {
          throw config_error("sweep.batch", "entries must be positive integers");
        }
        config.sweep.batch.push_back(static_cast<int>(b));
      }
    }
    if (sweep.contains("N")) {
      for (double n : as_number_list(sweep.at("N"), "sweep.N")) {
        if (n < 1 || n != std::floor(n)) {
          throw config_error("sweep.N", "entries must be positive integers");
        }
        config.sweep.N.push_back(static_cast<long>(n));
      }
    }
    if (!config.sweep.eta_fraction.empty() && config.eta) {
      throw config_error("sweep.eta_fraction",
                         "sweeping eta_fraction requires the base step size "
                         "to be given as eta_fraction");
    }
  }

  if (root.contains("output")) {
    const json& output = root.at("output");
    if (!output.is_object()) throw config_error("output", "expected an object");
    if (output.contains("dir")) {
      if (!output.at("dir").is_string()) {
        throw config_error("output.dir", "expected a string");
      }
      config.output.dir = output.at("dir").get<std::string>();
    }
    if (output.contains("per_coord")) {
      if (!output.at("per_coord").is_boolean()) {
        throw config_error("output.per_coord", "expected a boolean");
      }
      config.output.per_coord = output.at("per_coord").get<bool>();
    }
  }
  return config;
}

ExperimentConfig load_config_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw config_error("<file>", "cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

namespace {

double parse_double_or_throw(const std::string& key, const std::string& value) {
  try {
    size_t pos = 0;
    const double v = std::stod(value, &pos);
    if (pos != value.size()) throw std::invalid_argument("trailing characters");
    return v;
  } catch (const std::exception&) {
    throw config_error(key, "cannot parse '" + value + "' as a number");
  }
}

long parse_long_or_throw(const std::string& key, const std::string& value) {
  try {
    size_t pos = 0;
    const long v = std::stol(value, &pos);
    if (pos != value.size()) throw std::invalid_argument("trailing characters");
    return v;
  } catch (const std::exception&) {
    throw config_error(key, "cannot parse '" + value + "' as an integer");
  }
}

std::vector<double> parse_list_or_throw(const std::string& key,
                                        const std::string& value) {
  std::vector<double> out;
  std::stringstream ss(value);
  std::string item;
  while (std::getline(ss, item, ',')) {
    out.push_back(parse_double_or_throw(key, item));
  }
  if (out.empty()) throw config_error(key, "empty list");
  return out;
}

}  // namespace

void apply_override(ExperimentConfig& config, const std::string& key,
                    const std::string& value) {
  if (key == "spectrum.kind") {
    try {
      config.spectrum.kind = spectrum_kind_from_string(value);
    } catch (const std::invalid_argument& e) {
      throw config_error(key, e.what());
    }
  } else if (key == "spectrum.d") {
    config.spectrum.d = static_cast<int>(parse_long_or_throw(key, value));
  } else if (key == "spectrum.params.a") {
    config.spectrum.params.exponent = parse_double_or_throw(key, value);
  } else if (key == "spectrum.params.c") {
    config.spectrum.params.scale = parse_double_or_throw(key, value);
  } else if (key == "spectrum.params.v") {
    config.spectrum.params.value = parse_double_or_throw(key, value);
  } else if (key == "spectrum.params") {
    config.spectrum.params.values = parse_list_or_throw(key, value);
  } else if (key == "sigma2") {
    config.sigma2 = parse_double_or_throw(key, value);
  } else if (key == "eta") {
    config.eta = parse_double_or_throw(key, value);
    config.eta_fraction.reset();
  } else if (key == "eta_fraction") {
    config.eta_fraction = parse_double_or_throw(key, value);
    config.eta.reset();
  } else if (key == "batch") {
    config.batch = static_cast<int>(parse_long_or_throw(key, value));
  } else if (key == "m0_bias") {
    config.m0_bias.rank_one_uniform = false;
    config.m0_bias.values = parse_list_or_throw(key, value);
  } else if (key == "m0_bias.rank_one_uniform") {
    config.m0_bias.rank_one_uniform = true;
    config.m0_bias.r = parse_double_or_throw(key, value);
  } else if (key == "run.T") {
    config.run.T = parse_long_or_throw(key, value);
  } else if (key == "run.s") {
    config.run.s = parse_long_or_throw(key, value);
  } else if (key == "run.N") {
    config.run.N = parse_long_or_throw(key, value);
  } else if (key == "run.n_seeds") {
    config.run.n_seeds = static_cast<int>(parse_long_or_throw(key, value));
  } else if (key == "run.base_seed") {
    config.run.base_seed =
        static_cast<std::uint64_t>(parse_long_or_throw(key, value));
  } else if (key == "output.dir") {
    config.output.dir = value;
  } else if (key == "output.per_coord") {
    config.output.per_coord = (value == "true" || value == "1");
  } else {
    throw config_error(key, "unknown override key");
  }
}

namespace {

Vec resolve_m0(const M0Config& m0, int d) {
  if (m0.rank_one_uniform) {
    return Vec::Constant(d, m0.r * m0.r / static_cast<double>(d));
  }
  if (static_cast<int>(m0.values.size()) != d) {
    throw config_error("m0_bias", "list length does not match spectrum.d");
  }
  Vec out(d);
  for (int j = 0; j < d; ++j) {
    if (!(m0.values[static_cast<size_t>(j)] >= 0.0)) {
      throw config_error("m0_bias", "entries must be >= 0");
    }
    out[j] = m0.values[static_cast<size_t>(j)];
  }
  return out;
}

ProblemSpec build_spec(const ExperimentConfig& config, const Spectrum& spectrum,
                       int batch, std::optional<double> eta_fraction) {
  double eta;
  if (eta_fraction) {
    eta = *eta_fraction * max_stable_lr(spectrum, 2.0 / batch);
  } else if (config.eta_fraction) {
    eta = *config.eta_fraction * max_stable_lr(spectrum, 2.0 / batch);
  } else {
    eta = *config.eta;
  }
  if (!(eta > 0.0)) throw config_error("eta", "resolved step size must be > 0");
  return ProblemSpec(spectrum, config.sigma2, eta, batch,
                     resolve_m0(config.m0_bias, spectrum.dim()));
}

std::string trim_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%g", v);
  return buf;
}

}  // namespace

ProblemSpec resolve_spec(const ExperimentConfig& config) {
  Spectrum spectrum =
      make_spectrum(config.spectrum.kind, config.spectrum.params,
                    config.spectrum.d);
  return build_spec(config, spectrum, config.batch, std::nullopt);
}

std::vector<GridPoint> resolve_grid(const ExperimentConfig& config) {
  Spectrum spectrum =
      make_spectrum(config.spectrum.kind, config.spectrum.params,
                    config.spectrum.d);

  std::vector<std::optional<double>> fractions{std::nullopt};
  if (!config.sweep.eta_fraction.empty()) {
    fractions.clear();
    for (double f : config.sweep.eta_fraction) fractions.push_back(f);
  }
  std::vector<int> batches{config.batch};
  if (!config.sweep.batch.empty()) batches = config.sweep.batch;
  std::vector<long> windows{config.run.N};
  if (!config.sweep.N.empty()) windows = config.sweep.N;

  const bool label_f = !config.sweep.eta_fraction.empty();
  const bool label_b = !config.sweep.batch.empty();
  const bool label_n = !config.sweep.N.empty();

  std::vector<GridPoint> grid;
  for (const auto& fraction : fractions) {
    for (int batch : batches) {
      for (long N : windows) {
        std::string label;
        if (label_b) label += "_b" + std::to_string(batch);
        if (label_f) label += "_f" + trim_number(*fraction);
        if (label_n) label += "_N" + std::to_string(N);
        grid.push_back(GridPoint{
            build_spec(config, spectrum, batch, fraction),
            TailWindow(config.run.s, N), label});
      }
    }
  }
  return grid;
}

std::string resolve_out_dir(const ExperimentConfig& config) {
  if (!config.output.dir.empty()) return config.output.dir;
  if (const char* env = std::getenv("SGDRISK_OUT_DIR"); env && *env) {
    return env;
  }
  return ".";
}

}  // namespace sgdrisk
