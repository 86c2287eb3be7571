#include "sgdrisk/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "sgdrisk/errors.hpp"
#include "sgdrisk/rng.hpp"

namespace sgdrisk {

MatrixState full_matrix_step(const MatrixState& state, const ProblemSpec& spec) {
  const int d = spec.dim();
  if (state.M.rows() != d || state.M.cols() != d) {
    throw std::invalid_argument("matrix state dimension does not match spec");
  }
  const Vec& lambdas = spec.spectrum().values();
  const double eta = spec.eta();
  const double b = static_cast<double>(spec.batch());
  const Mat L = lambdas.matrix().asDiagonal();

  const Mat& M = state.M;
  const double weighted_trace = (lambdas * M.diagonal().array()).sum();
  Mat next = M - eta * M * L - eta * L * M +
             (eta * eta) * (1.0 + 1.0 / b) * L * M * L +
             ((eta * eta) / b) * weighted_trace * L +
             ((eta * eta) / b) * spec.sigma2() * L;
  return MatrixState{std::move(next), state.t + 1};
}

Mat full_matrix_diag_trajectory(const ProblemSpec& spec, const Mat& M0, long T) {
  MatrixState state{M0, 0};
  Mat diags(T + 1, spec.dim());
  diags.row(0) = state.M.diagonal().transpose();
  for (long t = 0; t < T; ++t) {
    state = full_matrix_step(state, spec);
    diags.row(t + 1) = state.M.diagonal().transpose();
  }
  return diags;
}

std::vector<IsserlisResult> isserlis_check_snapshots(
    const Spectrum& spectrum, const Mat& Sigma,
    const std::vector<long>& n_snapshots, std::uint64_t seed) {
  const int d = spectrum.dim();
  if (Sigma.rows() != d || Sigma.cols() != d) {
    throw std::invalid_argument("Sigma dimension does not match spectrum");
  }
  if (n_snapshots.empty()) {
    throw std::invalid_argument("need at least one snapshot count");
  }
  for (long n : n_snapshots) {
    if (n < 10000) {
      throw std::invalid_argument("isserlis check needs n_samples >= 1e4");
    }
  }
  if (min_eigenvalue_ratio(Sigma) < -1e-10) {
    throw std::invalid_argument("Sigma must be PSD");
  }

  const Vec& lambdas = spectrum.values();
  const Mat L = lambdas.matrix().asDiagonal();
  const Mat analytic = 2.0 * L * Sigma * L + (L * Sigma).trace() * L;
  // Near-zero entries are measured against 5% of the matrix scale so the
  // max does not saturate on sampling noise around an analytic zero.
  const double floor = 0.05 * analytic.cwiseAbs().maxCoeff();

  std::vector<long> sorted = n_snapshots;
  std::sort(sorted.begin(), sorted.end());

  CounterRng rng(seed);
  const Vec sqrt_lambda = lambdas.sqrt();
  Vec x(d);
  Mat accum = Mat::Zero(d, d);

  std::vector<IsserlisResult> out;
  long done = 0;
  for (long target : sorted) {
    for (; done < target; ++done) {
      for (int k = 0; k < d; ++k) x[k] = sqrt_lambda[k] * rng.next_gaussian();
      const double quad = x.matrix().transpose() * Sigma * x.matrix();
      accum.noalias() += quad * (x.matrix() * x.matrix().transpose());
    }
    IsserlisResult result;
    result.analytic = analytic;
    result.empirical = accum / static_cast<double>(done);
    result.max_rel_err = 0.0;
    for (int i = 0; i < d; ++i) {
      for (int j = 0; j < d; ++j) {
        const double denom = std::max(std::abs(analytic(i, j)), floor);
        const double err =
            denom > 0.0
                ? std::abs(result.empirical(i, j) - analytic(i, j)) / denom
                : std::abs(result.empirical(i, j) - analytic(i, j));
        result.max_rel_err = std::max(result.max_rel_err, err);
      }
    }
    out.push_back(std::move(result));
  }
  return out;
}

IsserlisResult isserlis_check(const Spectrum& spectrum, const Mat& Sigma,
                              long n_samples, std::uint64_t seed) {
  return isserlis_check_snapshots(spectrum, Sigma, {n_samples}, seed).front();
}

bool dominance_check(const ProblemSpec& spec) {
  const TransitionOperators ops = build_operators(spec);
  const int d = spec.dim();
  const double scale = std::max(1.0, ops.upper.cwiseAbs().maxCoeff());
  const double tol = 1e-12 * scale;
  if (((ops.exact - ops.upper).array() > tol).any()) return false;

  CounterRng rng(0x5eedu);
  for (int trial = 0; trial < 100; ++trial) {
    Vec v(d);
    for (int k = 0; k < d; ++k) v[k] = rng.next_unit();
    const Vec av = (ops.exact * v.matrix()).array();
    const Vec bv = (ops.upper * v.matrix()).array();
    if (((av - bv) > tol * v.maxCoeff()).any()) return false;
  }
  return true;
}

ResolventCheck resolvent_bound_check(const ProblemSpec& spec) {
  require_stable(spec, "resolvent_bound_check");
  const Vec& lambdas = spec.spectrum().values();
  const double eta = spec.eta();
  const int d = spec.dim();

  ResolventCheck check;
  check.rhs = Vec::Constant(d, 1.0 / (eta * spec.bound_prefactor_denom()));
  check.lhs = Vec::Zero(d);

  // Zero eigendirections never accumulate mass through the bounding
  // operator, so the solve is restricted to the support of lambda.
  std::vector<int> support;
  for (int k = 0; k < d; ++k) {
    if (lambdas[k] > 0.0) support.push_back(k);
  }
  if (!support.empty()) {
    const int n = static_cast<int>(support.size());
    Mat system(n, n);
    Eigen::VectorXd rhs_vec(n);
    for (int i = 0; i < n; ++i) {
      const double li = lambdas[support[static_cast<size_t>(i)]];
      const double f = 1.0 - eta * li;
      for (int j = 0; j < n; ++j) {
        const double lj = lambdas[support[static_cast<size_t>(j)]];
        system(i, j) = -spec.alpha() * eta * eta * li * lj;
      }
      system(i, i) += 1.0 - f * f;
      rhs_vec[i] = li;
    }
    const Eigen::VectorXd solution = system.partialPivLu().solve(rhs_vec);
    if (!solution.allFinite()) {
      throw stability_error("resolvent_bound_check: I - B is singular");
    }
    for (int i = 0; i < n; ++i) {
      check.lhs[support[static_cast<size_t>(i)]] = solution[i];
    }
  }
  check.holds = ((check.lhs - check.rhs) <= 1e-12).all();
  return check;
}

double min_eigenvalue_ratio(const Mat& M) {
  Eigen::SelfAdjointEigenSolver<Mat> solver(M);
  const double norm = std::max(1e-300, M.cwiseAbs().maxCoeff());
  return solver.eigenvalues().minCoeff() / norm;
}

}  // namespace sgdrisk
