#pragma once

#include "sgdrisk/engine.hpp"

namespace sgdrisk {

/// Closed-form bound on the bias contribution to the tail-averaged excess
/// risk. term_head is the (1/eta^2 N^2) inverse-weighted head-band norm,
/// term_tail the 4x tail-band norm, term_cross the rank-one coupling term.
struct BiasBoundReport {
  double term_head = 0.0;
  double term_tail = 0.0;
  double term_cross = 0.0;
  double total = 0.0;
  int k_star = 0;
  int k_dagger = 0;
  bool stable = true;
};

/// Three-band bound on the variance contribution:
///   prefactor * (band_head + band_mid + band_tail)
/// with band_head = sigma^2 k*/N, band_mid = 4 eta sigma^2 sum_{k*<j<=k+}
/// lambda_j, band_tail = 16 eta^2 (s+N) sigma^2 sum_{j>k+} lambda_j.
struct VarianceBoundReport {
  double band_head = 0.0;
  double band_mid = 0.0;
  double band_tail = 0.0;
  double prefactor = 1.0;
  double total = 0.0;
  int k_star = 0;
  int k_dagger = 0;
  bool stable = true;
};

/// Leading-order lower-bound expressions evaluated with every suppressed
/// constant set to 1. Report-only: the true constants are not pinned, so
/// nothing should assert against these values.
struct LowerBoundReport {
  double bias_lb = 0.0;
  double variance_lb = 0.0;
  bool diagnostic_only = true;
  int k_star = 0;
  int k_dagger = 0;
  bool stable = true;
};

/// Both sides of the coupling-sum certificate: lhs = sum of the rank-one
/// coupling coefficients along the exact bias track, rhs = its closed-form
/// bound alpha*eta*(s_0 - s_k)/(1 - eta alpha tr(H)) where s_t is the
/// total bias mass <m_t, 1>.
struct CouplingSumCheck {
  double lhs = 0.0;
  double rhs = 0.0;
};

BiasBoundReport bias_risk_bound(const ProblemSpec& spec, TailWindow window);
VarianceBoundReport variance_risk_bound(const ProblemSpec& spec, TailWindow window);

/// Elementwise upper bound on the bias track at iteration t.
Vec bias_iterate_bound(const ProblemSpec& spec, long t);
/// Elementwise upper bound on the variance track at iteration t.
Vec variance_iterate_bound(const ProblemSpec& spec, long t);

CouplingSumCheck coupling_sum_check(const ProblemSpec& spec, long k);

LowerBoundReport lower_bound_diagnostic(const ProblemSpec& spec, TailWindow window);

}  // namespace sgdrisk
