#pragma once

#include <cstdint>
#include <vector>

#include "sgdrisk/problem.hpp"

namespace sgdrisk {

/// Simulation problem with the sign information the diagonal recursion
/// drops: w_delta0 holds the eigen-coordinates of w0 - w* (any signs;
/// squaring them recovers the spec's m0_bias). Sampling runs directly in
/// the eigenbasis, which loses nothing since risk and the update law are
/// rotation-equivariant.
struct McProblem {
  Spectrum spectrum;
  Vec w_delta0;
  double sigma2 = 0.0;
  double eta = 0.0;
  int batch = 1;

  McProblem(Spectrum spectrum_, Vec w_delta0_, double sigma2_, double eta_,
            int batch_);

  /// The diagonal-recursion spec this problem instantiates.
  ProblemSpec to_spec() const;
};

struct PathResult {
  double final_excess = 0.0;
  double tail_avg_excess = 0.0;
};

struct McEstimate {
  double mean = 0.0;
  double std_error = 0.0;
  int n_seeds = 0;
};

/// Runs T steps of mini-batch SGD with fresh Gaussian data and per-example
/// noise; returns the excess risk of the final iterate and of the tail
/// average over iterates s .. s+N-1. Bit-reproducible given the seed.
PathResult sgd_path(const McProblem& problem, std::uint64_t seed, long T,
                    TailWindow window);

/// Mean and standard error of tail_avg_excess over seeds
/// base_seed .. base_seed + n_seeds - 1. Deterministic; seeds may be
/// evaluated in parallel (jobs > 1) without changing the result.
McEstimate mc_estimate(const McProblem& problem, int n_seeds, long T,
                       TailWindow window, std::uint64_t base_seed,
                       int jobs = 1);

/// Per-seed results in seed order (the CSV payload behind mc_estimate).
std::vector<PathResult> mc_paths(const McProblem& problem, int n_seeds, long T,
                                 TailWindow window, std::uint64_t base_seed,
                                 int jobs = 1);

/// Seed-averaged squared coordinates E[delta_t^2] for t = 0..T, one row
/// per t; used to cross-check the exact recursion coordinate by
/// coordinate. Also writes the standard error of each cell.
void mc_second_moments(const McProblem& problem, int n_seeds, long T,
                       std::uint64_t base_seed, Mat& mean_out, Mat& stderr_out,
                       int jobs = 1);

}  // namespace sgdrisk
