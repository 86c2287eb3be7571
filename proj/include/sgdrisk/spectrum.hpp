#pragma once

#include <string>
#include <vector>

#include "sgdrisk/numerics.hpp"

namespace sgdrisk {

/// Eigenvalues of the data covariance, sorted descending. The whole
/// problem lives in this eigenbasis, so the spectrum plus a step size is
/// all the geometry there is.
class Spectrum {
 public:
  /// Validates: non-negative entries, descending order, size >= 1.
  explicit Spectrum(Vec lambdas);

  int dim() const { return static_cast<int>(lambdas_.size()); }
  const Vec& values() const { return lambdas_; }
  double operator[](int j) const { return lambdas_[j]; }

  double lambda_max() const { return lambdas_[0]; }
  double trace() const { return trace_; }

 private:
  Vec lambdas_;
  double trace_;
};

enum class SpectrumKind { power_law, uniform, explicit_list };

struct SpectrumParams {
  double exponent = 1.0;        // power_law: lambda_j = scale * j^(-exponent)
  double scale = 1.0;           // power_law
  double value = 0.0;           // uniform
  std::vector<double> values;   // explicit_list (any order; sorted on build)
};

Spectrum make_spectrum(SpectrumKind kind, const SpectrumParams& params, int d);

Spectrum power_law_spectrum(int d, double exponent, double scale = 1.0);
Spectrum uniform_spectrum(int d, double value);
Spectrum spectrum_from_values(std::vector<double> values);

SpectrumKind spectrum_kind_from_string(const std::string& name);
std::string to_string(SpectrumKind kind);

}  // namespace sgdrisk
