#include "sgdrisk/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace sgdrisk {

Spectrum::Spectrum(Vec lambdas) : lambdas_(std::move(lambdas)) {
  if (lambdas_.size() < 1) {
    throw std::invalid_argument("spectrum must have dimension >= 1");
  }
  for (Eigen::Index j = 0; j < lambdas_.size(); ++j) {
    if (!(lambdas_[j] >= 0.0)) {
      throw std::invalid_argument("spectrum entries must be non-negative");
    }
    if (j > 0 && lambdas_[j] > lambdas_[j - 1]) {
      throw std::invalid_argument("spectrum must be sorted descending");
    }
  }
  trace_ = compensated_sum(lambdas_);
}

Spectrum make_spectrum(SpectrumKind kind, const SpectrumParams& params, int d) {
  switch (kind) {
    case SpectrumKind::power_law:
      return power_law_spectrum(d, params.exponent, params.scale);
    case SpectrumKind::uniform:
      return uniform_spectrum(d, params.value);
    case SpectrumKind::explicit_list: {
      if (static_cast<int>(params.values.size()) != d) {
        throw std::invalid_argument(
            "explicit spectrum list length does not match d");
      }
      return spectrum_from_values(params.values);
    }
  }
  throw std::invalid_argument("unknown spectrum kind");
}

Spectrum power_law_spectrum(int d, double exponent, double scale) {
  if (d < 1) throw std::invalid_argument("spectrum dimension must be >= 1");
  if (!(exponent > 0.0)) {
    throw std::invalid_argument("power-law exponent must be > 0");
  }
  if (!(scale > 0.0)) {
    throw std::invalid_argument("power-law scale must be > 0");
  }
  Vec lambdas(d);
  for (int j = 0; j < d; ++j) {
    lambdas[j] = scale * std::pow(static_cast<double>(j + 1), -exponent);
  }
  return Spectrum(std::move(lambdas));
}

Spectrum uniform_spectrum(int d, double value) {
  if (d < 1) throw std::invalid_argument("spectrum dimension must be >= 1");
  if (!(value >= 0.0)) {
    throw std::invalid_argument("uniform spectrum value must be >= 0");
  }
  return Spectrum(Vec::Constant(d, value));
}

Spectrum spectrum_from_values(std::vector<double> values) {
  if (values.empty()) {
    throw std::invalid_argument("spectrum dimension must be >= 1");
  }
  for (double v : values) {
    if (!(v >= 0.0)) {
      throw std::invalid_argument("spectrum entries must be non-negative");
    }
  }
  std::sort(values.begin(), values.end(), std::greater<double>());
  Vec lambdas(static_cast<Eigen::Index>(values.size()));
  for (size_t j = 0; j < values.size(); ++j) {
    lambdas[static_cast<Eigen::Index>(j)] = values[j];
  }
  return Spectrum(std::move(lambdas));
}

SpectrumKind spectrum_kind_from_string(const std::string& name) {
  if (name == "power_law") return SpectrumKind::power_law;
  if (name == "uniform") return SpectrumKind::uniform;
  if (name == "explicit") return SpectrumKind::explicit_list;
  throw std::invalid_argument("unknown spectrum kind '" + name + "'");
}

std::string to_string(SpectrumKind kind) {
  switch (kind) {
    case SpectrumKind::power_law: return "power_law";
    case SpectrumKind::uniform: return "uniform";
    case SpectrumKind::explicit_list: return "explicit";
  }
  return "?";
}

}  // namespace sgdrisk
