#pragma once

#include <vector>

#include "sgdrisk/problem.hpp"

namespace sgdrisk {

/// Diagonal of the rotated iterate covariance at iteration t.
struct StateVector {
  Vec m;
  long t = 0;
};

/// The same diagonal split into its initialization-driven part (bias,
/// evolved with sigma^2 = 0) and its noise-driven part (variance, evolved
/// from zero). Their sum is the state of the unsplit recursion.
struct SplitState {
  StateVector bias;
  StateVector variance;

  Vec total() const { return bias.m + variance.m; }
};

struct Trajectory {
  ProblemSpec spec;
  std::vector<SplitState> states;  // t = 0 .. T

  long horizon() const { return static_cast<long>(states.size()) - 1; }
  const SplitState& at(long t) const { return states.at(static_cast<size_t>(t)); }
};

/// The three d x d operators the bounds argue about:
///   exact: batch-b one-step transition of the diagonal recursion
///   upper: (I - eta L)^2 + alpha eta^2 lambda lambda^T, dominates exact
///   decay: (I - eta L)^2, dominated by exact
struct TransitionOperators {
  Mat exact;
  Mat upper;
  Mat decay;
};

namespace detail {

/// Coefficients of one step of the diagonal recursion:
///   m' = decay .* m + rank1 * lambda * <lambda, m> + noise
struct StepCoeffs {
  Vec decay;      // 1 - 2 eta lambda + eta^2 (1 + 1/b) lambda^2
  double rank1;   // eta^2 / b
  Vec noise;      // (eta^2 / b) sigma^2 lambda
};

StepCoeffs step_coeffs(const ProblemSpec& spec);
Vec apply_step(const StepCoeffs& coeffs, const Vec& lambdas, const Vec& m);

}  // namespace detail

/// One step of the exact diagonal recursion at the spec's batch size.
StateVector step_m(const StateVector& state, const ProblemSpec& spec);

/// Evolves bias and variance tracks for t = 0..T.
Trajectory evolve_split(const ProblemSpec& spec, long T);

/// Population risk 0.5 <lambda, m> + 0.5 sigma^2.
double risk_of_m(const StateVector& state, const ProblemSpec& spec);
/// Risk above the noise floor: 0.5 <lambda, m>.
double excess_risk_of_m(const StateVector& state, const ProblemSpec& spec);

/// Exact risk of the tail-averaged iterate, including cross-iterate
/// correlations. Needs states up to t = s + N - 1. Valid for unstable
/// specs too (it is an identity, not a bound).
double tail_risk_exact(const Trajectory& traj, TailWindow window);

/// Same quantity restricted to one track of the split (pass the bias track
/// of a trajectory to get the bias contribution, etc.).
double tail_excess_bias(const Trajectory& traj, TailWindow window);
double tail_excess_variance(const Trajectory& traj, TailWindow window);

/// Closed-form upper bound on the tail-averaged risk:
///   (1/(eta N^2)) <sum_i m_i, 1 - (1 - eta lambda)^N> + sigma^2/2.
/// Refuses unstable specs.
double tail_risk_bound(const Trajectory& traj, TailWindow window);

/// Streaming evaluation of the tail-window quantities without storing the
/// trajectory; memory O(d) regardless of s and N. bound_excess carries the
/// closed-form upper-bound expression (only meaningful for stable specs).
struct TailExcessParts {
  double bias = 0.0;
  double variance = 0.0;
  double bound_excess = 0.0;

  double total() const { return bias + variance; }
};

TailExcessParts tail_excess_parts(const ProblemSpec& spec, TailWindow window);

TransitionOperators build_operators(const ProblemSpec& spec);

}  // namespace sgdrisk
