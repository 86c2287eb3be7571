#pragma once

#include <algorithm>
#include <vector>

#include "sgdrisk/problem.hpp"
#include "sgdrisk/rng.hpp"

namespace testutil {

using namespace sgdrisk;

struct SpecOptions {
  std::vector<int> dims{1, 2, 4, 8};
  std::vector<int> batches{1, 2, 4};
  double min_fraction = 0.1;
  double max_fraction = 1.0;
  double max_sigma2 = 1.0;
  double max_lambda = 1.0;
  bool power_law_only = false;
};

inline Spectrum random_spectrum(CounterRng& rng, int d, double max_lambda,
                                bool power_law_only) {
  if (power_law_only || rng.next_unit() < 0.5) {
    const double exponent = 0.5 + 1.5 * rng.next_unit();
    const double scale = max_lambda * (0.2 + 0.8 * rng.next_unit());
    return power_law_spectrum(d, exponent, scale);
  }
  std::vector<double> values(static_cast<size_t>(d));
  for (auto& v : values) v = max_lambda * rng.next_unit();
  return spectrum_from_values(std::move(values));
}

inline ProblemSpec random_stable_spec(CounterRng& rng,
                                      const SpecOptions& opt = {}) {
  const int d = opt.dims[rng.next_u64() % opt.dims.size()];
  const int b = opt.batches[rng.next_u64() % opt.batches.size()];
  Spectrum spectrum = random_spectrum(rng, d, opt.max_lambda, opt.power_law_only);
  const double fraction =
      opt.min_fraction + (opt.max_fraction - opt.min_fraction) * rng.next_unit();
  const double eta = fraction * max_stable_lr(spectrum, 2.0 / b);
  const double sigma2 = opt.max_sigma2 * rng.next_unit();
  Vec m0(d);
  for (int j = 0; j < d; ++j) m0[j] = rng.next_unit();
  return ProblemSpec(std::move(spectrum), sigma2, eta, b, std::move(m0));
}

inline TailWindow random_window(CounterRng& rng, long max_s = 100,
                                long max_n = 100) {
  const long s = static_cast<long>(rng.next_u64() % (max_s + 1));
  const long N = 1 + static_cast<long>(rng.next_u64() % max_n);
  return TailWindow(s, N);
}

}  // namespace testutil
