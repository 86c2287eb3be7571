#include "sgdrisk/engine.hpp"

#include <cmath>
#include <stdexcept>

#include "sgdrisk/errors.hpp"

namespace sgdrisk {

namespace detail {

StepCoeffs step_coeffs(const ProblemSpec& spec) {
  const Vec& lambdas = spec.spectrum().values();
  const double eta = spec.eta();
  const double b = static_cast<double>(spec.batch());
  StepCoeffs coeffs;
  coeffs.decay =
      1.0 - 2.0 * eta * lambdas + eta * eta * (1.0 + 1.0 / b) * lambdas.square();
  coeffs.rank1 = eta * eta / b;
  coeffs.noise = coeffs.rank1 * spec.sigma2() * lambdas;
  return coeffs;
}

Vec apply_step(const StepCoeffs& coeffs, const Vec& lambdas, const Vec& m) {
  const double risk_weighted = compensated_dot(lambdas, m);
  return coeffs.decay * m + (coeffs.rank1 * risk_weighted) * lambdas +
         coeffs.noise;
}

}  // namespace detail

StateVector step_m(const StateVector& state, const ProblemSpec& spec) {
  if (state.m.size() != spec.dim()) {
    throw std::invalid_argument("state dimension does not match spec");
  }
  const auto coeffs = detail::step_coeffs(spec);
  return StateVector{detail::apply_step(coeffs, spec.spectrum().values(), state.m),
                     state.t + 1};
}

Trajectory evolve_split(const ProblemSpec& spec, long T) {
  if (T < 0) throw std::invalid_argument("horizon T must be >= 0");
  const Vec& lambdas = spec.spectrum().values();
  const auto noiseless = detail::step_coeffs(spec.with_sigma2(0.0));
  const auto noisy = detail::step_coeffs(spec);

  Trajectory traj{spec, {}};
  traj.states.reserve(static_cast<size_t>(T) + 1);
  traj.states.push_back(SplitState{StateVector{spec.m0_bias(), 0},
                                   StateVector{Vec::Zero(spec.dim()), 0}});
  for (long t = 0; t < T; ++t) {
    const SplitState& prev = traj.states.back();
    traj.states.push_back(SplitState{
        StateVector{detail::apply_step(noiseless, lambdas, prev.bias.m), t + 1},
        StateVector{detail::apply_step(noisy, lambdas, prev.variance.m), t + 1}});
  }
  return traj;
}

double excess_risk_of_m(const StateVector& state, const ProblemSpec& spec) {
  if (state.m.size() != spec.dim()) {
    throw std::invalid_argument("state dimension does not match spec");
  }
  return 0.5 * compensated_dot(spec.spectrum().values(), state.m);
}

double risk_of_m(const StateVector& state, const ProblemSpec& spec) {
  return excess_risk_of_m(state, spec) + 0.5 * spec.sigma2();
}

namespace {

void require_window(const Trajectory& traj, TailWindow window) {
  if (traj.horizon() < window.s + window.N - 1) {
    throw std::invalid_argument(
        "trajectory too short for the requested tail window");
  }
}

enum class Track { total, bias, variance };

// Exact excess risk of the tail average of one track given its per-iterate
// diagonals: (1/(2N^2)) sum_k lambda_k sum_i m_i^k (1 + 2 g_k(s+N-1-i))
// where g_k is the geometric sum of (1 - eta lambda_k) powers. The
// cross-iterate terms are exact, not bounded.
double tail_excess_of(const Trajectory& traj, TailWindow window, Track track) {
  const ProblemSpec& spec = traj.spec;
  const Vec& lambdas = spec.spectrum().values();
  const double eta = spec.eta();
  const double N = static_cast<double>(window.N);

  Vec per_coord = Vec::Zero(spec.dim());
  Vec total;
  for (long i = window.s; i < window.s + window.N; ++i) {
    const SplitState& state = traj.states[static_cast<size_t>(i)];
    const Vec* m = &state.bias.m;
    if (track == Track::variance) {
      m = &state.variance.m;
    } else if (track == Track::total) {
      total = state.bias.m + state.variance.m;
      m = &total;
    }
    const long remaining = window.s + window.N - 1 - i;
    for (Eigen::Index k = 0; k < lambdas.size(); ++k) {
      const double weight =
          1.0 + 2.0 * geometric_tail_sum(eta * lambdas[k], remaining);
      per_coord[k] += (*m)[k] * weight;
    }
  }
  return compensated_dot(lambdas, per_coord) / (2.0 * N * N);
}

}  // namespace

double tail_risk_exact(const Trajectory& traj, TailWindow window) {
  require_window(traj, window);
  return tail_excess_of(traj, window, Track::total) + 0.5 * traj.spec.sigma2();
}

double tail_excess_bias(const Trajectory& traj, TailWindow window) {
  require_window(traj, window);
  return tail_excess_of(traj, window, Track::bias);
}

double tail_excess_variance(const Trajectory& traj, TailWindow window) {
  require_window(traj, window);
  return tail_excess_of(traj, window, Track::variance);
}

double tail_risk_bound(const Trajectory& traj, TailWindow window) {
  require_window(traj, window);
  require_stable(traj.spec, "tail_risk_bound");
  const ProblemSpec& spec = traj.spec;
  const Vec& lambdas = spec.spectrum().values();
  const double eta = spec.eta();
  const double N = static_cast<double>(window.N);

  Vec summed = Vec::Zero(spec.dim());
  for (long i = window.s; i < window.s + window.N; ++i) {
    summed += traj.states[static_cast<size_t>(i)].total();
  }
  Vec weights(spec.dim());
  for (Eigen::Index k = 0; k < lambdas.size(); ++k) {
    weights[k] = 1.0 - std::pow(1.0 - eta * lambdas[k], N);
  }
  return compensated_dot(summed, weights) / (eta * N * N) +
         0.5 * spec.sigma2();
}

TailExcessParts tail_excess_parts(const ProblemSpec& spec, TailWindow window) {
  const Vec& lambdas = spec.spectrum().values();
  const double eta = spec.eta();
  const double N = static_cast<double>(window.N);
  const auto noiseless = detail::step_coeffs(spec.with_sigma2(0.0));
  const auto noisy = detail::step_coeffs(spec);

  Vec bias = spec.m0_bias();
  Vec variance = Vec::Zero(spec.dim());
  Vec bias_weighted = Vec::Zero(spec.dim());
  Vec variance_weighted = Vec::Zero(spec.dim());
  Vec summed = Vec::Zero(spec.dim());

  for (long i = 0; i < window.s + window.N; ++i) {
    if (i >= window.s) {
      const long remaining = window.s + window.N - 1 - i;
      for (Eigen::Index k = 0; k < lambdas.size(); ++k) {
        const double weight =
            1.0 + 2.0 * geometric_tail_sum(eta * lambdas[k], remaining);
        bias_weighted[k] += bias[k] * weight;
        variance_weighted[k] += variance[k] * weight;
        summed[k] += bias[k] + variance[k];
      }
    }
    bias = detail::apply_step(noiseless, lambdas, bias);
    variance = detail::apply_step(noisy, lambdas, variance);
  }

  TailExcessParts parts;
  parts.bias = compensated_dot(lambdas, bias_weighted) / (2.0 * N * N);
  parts.variance = compensated_dot(lambdas, variance_weighted) / (2.0 * N * N);
  Vec bound_weights(spec.dim());
  for (Eigen::Index k = 0; k < lambdas.size(); ++k) {
    bound_weights[k] = 1.0 - std::pow(1.0 - eta * lambdas[k], N);
  }
  parts.bound_excess = compensated_dot(summed, bound_weights) / (eta * N * N);
  return parts;
}

TransitionOperators build_operators(const ProblemSpec& spec) {
  const Vec& lambdas = spec.spectrum().values();
  const double eta = spec.eta();
  const double b = static_cast<double>(spec.batch());
  const int d = spec.dim();

  Mat decay = Mat::Zero(d, d);
  for (int k = 0; k < d; ++k) {
    const double f = 1.0 - eta * lambdas[k];
    decay(k, k) = f * f;
  }

  Mat rank1(d, d);
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) rank1(i, j) = lambdas[i] * lambdas[j];
  }

  TransitionOperators ops;
  ops.decay = decay;
  ops.upper = decay + spec.alpha() * eta * eta * rank1;
  ops.exact = (eta * eta / b) * rank1;
  for (int k = 0; k < d; ++k) {
    ops.exact(k, k) += 1.0 - 2.0 * eta * lambdas[k] +
                       eta * eta * (1.0 + 1.0 / b) * lambdas[k] * lambdas[k];
  }
  return ops;
}

}  // namespace sgdrisk
