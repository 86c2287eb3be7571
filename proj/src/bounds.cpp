#include "sgdrisk/bounds.hpp"

#include <cmath>
#include <stdexcept>

#include "sgdrisk/errors.hpp"

namespace sgdrisk {

namespace {

double pow_decay(double eta_lambda, double exponent) {
  return std::pow(1.0 - eta_lambda, exponent);
}

}  // namespace

BiasBoundReport bias_risk_bound(const ProblemSpec& spec, TailWindow window) {
  require_stable(spec, "bias_risk_bound");
  const Vec& lambdas = spec.spectrum().values();
  const Vec& m0 = spec.m0_bias();
  const double eta = spec.eta();
  const double alpha = spec.alpha();
  const double N = static_cast<double>(window.N);
  const double s = static_cast<double>(window.s);
  const Thresholds th = thresholds(spec.spectrum(), eta, window);

  BiasBoundReport report;
  report.k_star = th.k_star;
  report.k_dagger = th.k_dagger;
  report.stable = true;

  // Eigen-coordinates of (I - eta L)^s (w0 - w*), squared: the s-step
  // decayed bias mass per direction.
  double head_inv = 0.0;          // sum_{j<=k*} omega_j / lambda_j
  double tail_weighted = 0.0;     // sum_{j>k*} omega_j lambda_j
  double head_mass0 = 0.0;        // sum_{j<=k*} m0_j  (undecayed)
  double tail_weighted0 = 0.0;    // sum_{j>k*} lambda_j m0_j (undecayed)
  double tail_sq = 0.0;           // sum_{j>k*} lambda_j^2
  for (Eigen::Index j = 0; j < lambdas.size(); ++j) {
    const double omega = m0[j] * pow_decay(eta * lambdas[j], 2.0 * s);
    if (static_cast<int>(j) < th.k_star) {
      // Head band has lambda_j >= 1/(eta N) > 0, so the inverse weight is
      // always defined here.
      head_inv += omega / lambdas[j];
      head_mass0 += m0[j];
    } else {
      tail_weighted += omega * lambdas[j];
      tail_weighted0 += m0[j] * lambdas[j];
      tail_sq += lambdas[j] * lambdas[j];
    }
  }

  report.term_head = head_inv / (eta * eta * N * N);
  report.term_tail = 4.0 * tail_weighted;

  const double denom = spec.bound_prefactor_denom();
  const double coupling_mass =
      head_mass0 + 2.0 * (s + N) * eta * tail_weighted0;
  const double band_factor =
      (static_cast<double>(th.k_star) + 4.0 * eta * eta * N * N * tail_sq) / N;
  report.term_cross =
      alpha * coupling_mass / (eta * N * denom) * band_factor;

  report.total = report.term_head + report.term_tail + report.term_cross;
  return report;
}

VarianceBoundReport variance_risk_bound(const ProblemSpec& spec,
                                        TailWindow window) {
  require_stable(spec, "variance_risk_bound");
  const Vec& lambdas = spec.spectrum().values();
  const double eta = spec.eta();
  const double sigma2 = spec.sigma2();
  const double N = static_cast<double>(window.N);
  const Thresholds th = thresholds(spec.spectrum(), eta, window);

  VarianceBoundReport report;
  report.k_star = th.k_star;
  report.k_dagger = th.k_dagger;
  report.stable = true;

  double mid_sum = 0.0;   // k* < j <= k+
  double tail_sum = 0.0;  // j > k+ (strict, so the bands partition)
  for (Eigen::Index j = 0; j < lambdas.size(); ++j) {
    const int idx = static_cast<int>(j) + 1;
    if (idx > th.k_star && idx <= th.k_dagger) {
      mid_sum += lambdas[j];
    } else if (idx > th.k_dagger) {
      tail_sum += lambdas[j];
    }
  }

  report.band_head = sigma2 * static_cast<double>(th.k_star) / N;
  report.band_mid = 4.0 * eta * sigma2 * mid_sum;
  report.band_tail = 16.0 * eta * eta *
                     static_cast<double>(window.s + window.N) * sigma2 *
                     tail_sum;
  report.prefactor = 1.0 / spec.bound_prefactor_denom();
  report.total =
      report.prefactor * (report.band_head + report.band_mid + report.band_tail);
  return report;
}

Vec bias_iterate_bound(const ProblemSpec& spec, long t) {
  require_stable(spec, "bias_iterate_bound");
  if (t < 0) throw std::invalid_argument("t must be >= 0");
  const Vec& lambdas = spec.spectrum().values();
  const Vec& m0 = spec.m0_bias();
  const double eta = spec.eta();

  Vec out(spec.dim());
  double released_mass = 0.0;  // <m0, 1 - (1 - eta lambda)^{2t}>
  for (Eigen::Index j = 0; j < lambdas.size(); ++j) {
    released_mass += m0[j] * (1.0 - pow_decay(eta * lambdas[j], 2.0 * t));
  }
  const double coupling =
      spec.alpha() * eta * released_mass / spec.bound_prefactor_denom();
  for (Eigen::Index j = 0; j < lambdas.size(); ++j) {
    out[j] = m0[j] * pow_decay(eta * lambdas[j], 2.0 * t) +
             coupling * lambdas[j];
  }
  return out;
}

Vec variance_iterate_bound(const ProblemSpec& spec, long t) {
  require_stable(spec, "variance_iterate_bound");
  if (t < 0) throw std::invalid_argument("t must be >= 0");
  const Vec& lambdas = spec.spectrum().values();
  const double eta = spec.eta();
  const double scale =
      eta * spec.sigma2() / spec.bound_prefactor_denom();
  Vec out(spec.dim());
  for (Eigen::Index j = 0; j < lambdas.size(); ++j) {
    out[j] = scale * (1.0 - pow_decay(eta * lambdas[j], 2.0 * t));
  }
  return out;
}

CouplingSumCheck coupling_sum_check(const ProblemSpec& spec, long k) {
  require_stable(spec, "coupling_sum_check");
  if (k < 0) throw std::invalid_argument("k must be >= 0");
  const Vec& lambdas = spec.spectrum().values();
  const double eta = spec.eta();
  const double alpha = spec.alpha();

  // Exact bias track; the coupling coefficient at step t is
  // alpha eta^2 <lambda, m_{t-1}>, with the t = 0 term defined as 0.
  const Trajectory traj = evolve_split(spec.with_sigma2(0.0), k);
  CouplingSumCheck check;
  for (long t = 1; t < k; ++t) {
    check.lhs += alpha * eta * eta *
                 compensated_dot(lambdas, traj.states[static_cast<size_t>(t - 1)].bias.m);
  }
  const double mass0 = compensated_sum(traj.states.front().bias.m);
  const double mass_k = compensated_sum(traj.states.back().bias.m);
  check.rhs = alpha * eta * (mass0 - mass_k) / spec.bound_prefactor_denom();
  return check;
}

LowerBoundReport lower_bound_diagnostic(const ProblemSpec& spec,
                                        TailWindow window) {
  require_stable(spec, "lower_bound_diagnostic");
  const Vec& lambdas = spec.spectrum().values();
  const Vec& m0 = spec.m0_bias();
  const double eta = spec.eta();
  const double N = static_cast<double>(window.N);
  const double s = static_cast<double>(window.s);
  const Thresholds th = thresholds(spec.spectrum(), eta, window);

  LowerBoundReport report;
  report.k_star = th.k_star;
  report.k_dagger = th.k_dagger;
  report.stable = true;
  report.diagnostic_only = true;

  double head_inv = 0.0;
  double tail_weighted = 0.0;
  double tail_sq = 0.0;
  double dagger_tail_weighted0 = 0.0;  // sum_{j>k+} lambda_j m0_j
  double mid_sum = 0.0;
  double dagger_tail_sq = 0.0;         // sum_{j>k+} lambda_j^2
  for (Eigen::Index j = 0; j < lambdas.size(); ++j) {
    const int idx = static_cast<int>(j) + 1;
    const double omega = m0[j] * pow_decay(eta * lambdas[j], 2.0 * s);
    if (idx <= th.k_star) {
      head_inv += omega / lambdas[j];
    } else {
      tail_weighted += omega * lambdas[j];
      tail_sq += lambdas[j] * lambdas[j];
    }
    if (idx > th.k_star && idx <= th.k_dagger) mid_sum += lambdas[j];
    if (idx > th.k_dagger) {
      dagger_tail_weighted0 += lambdas[j] * m0[j];
      dagger_tail_sq += lambdas[j] * lambdas[j];
    }
  }

  report.bias_lb =
      head_inv / (eta * eta * N * N) + tail_weighted +
      dagger_tail_weighted0 *
          (static_cast<double>(th.k_star) / N + N * eta * eta * tail_sq);
  report.variance_lb =
      spec.sigma2() *
      (static_cast<double>(th.k_star) / N + eta * mid_sum +
       static_cast<double>(window.s + window.N) * eta * eta * dagger_tail_sq);
  return report;
}

}  // namespace sgdrisk
