#pragma once

#include <cstdint>
#include <vector>

#include "sgdrisk/engine.hpp"

namespace sgdrisk {

/// Full rotated iterate covariance; the brute-force counterpart of the
/// diagonal recursion.
struct MatrixState {
  Mat M;
  long t = 0;
};

struct IsserlisResult {
  Mat analytic;
  Mat empirical;
  double max_rel_err = 0.0;
};

struct ResolventCheck {
  Vec lhs;
  Vec rhs;
  bool holds = false;
};

/// One step of the full d x d covariance recursion at the spec's batch
/// size. The diagonal of the output must match step_m on the diagonal of
/// the input; that equality is the reduction everything else rests on.
MatrixState full_matrix_step(const MatrixState& state, const ProblemSpec& spec);

/// Evolves the full-matrix recursion from M0 and returns diag(M_t) for
/// t = 0..T, one row per t.
Mat full_matrix_diag_trajectory(const ProblemSpec& spec, const Mat& M0, long T);

/// Gaussian fourth-moment identity E[(x^T S x) x x^T] = 2 H S H + tr(H S) H
/// checked against a sample mean of n draws with x ~ N(0, diag(spectrum)).
/// Entrywise relative errors are measured against a floor of 5% of the
/// largest analytic entry. Requires n_samples >= 1e4 and S PSD.
IsserlisResult isserlis_check(const Spectrum& spectrum, const Mat& Sigma,
                              long n_samples, std::uint64_t seed);

/// Same check evaluated at nested sample-count snapshots from one stream,
/// so the convergence rate can be read off a single pass.
std::vector<IsserlisResult> isserlis_check_snapshots(
    const Spectrum& spectrum, const Mat& Sigma,
    const std::vector<long>& n_snapshots, std::uint64_t seed);

/// exact <= upper elementwise, plus exact*v <= upper*v for 100 random
/// non-negative v.
bool dominance_check(const ProblemSpec& spec);

/// lhs = (I - upper)^{-1} lambda by direct solve (restricted to the
/// support of lambda), rhs = 1/(eta (1 - eta alpha tr H)) elementwise;
/// holds iff lhs <= rhs + 1e-12.
ResolventCheck resolvent_bound_check(const ProblemSpec& spec);

/// Smallest eigenvalue relative to the matrix norm; PSD sanity helper.
double min_eigenvalue_ratio(const Mat& M);

}  // namespace sgdrisk
