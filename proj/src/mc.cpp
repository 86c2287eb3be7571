#include "sgdrisk/mc.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <thread>
#include <vector>

#include "sgdrisk/numerics.hpp"
#include "sgdrisk/rng.hpp"

namespace sgdrisk {

McProblem::McProblem(Spectrum spectrum_, Vec w_delta0_, double sigma2_,
                     double eta_, int batch_)
    : spectrum(std::move(spectrum_)),
      w_delta0(std::move(w_delta0_)),
      sigma2(sigma2_),
      eta(eta_),
      batch(batch_) {
  if (w_delta0.size() != spectrum.dim()) {
    throw std::invalid_argument("w_delta0 length must match spectrum dimension");
  }
  if (!(sigma2 >= 0.0)) throw std::invalid_argument("sigma2 must be >= 0");
  if (!(eta >= 0.0)) throw std::invalid_argument("eta must be >= 0");
  if (batch < 1) throw std::invalid_argument("batch must be >= 1");
}

ProblemSpec McProblem::to_spec() const {
  return ProblemSpec(spectrum, sigma2, eta, batch, w_delta0.square());
}

namespace {

// Runs one path and hands every iterate (including the initial one) to the
// visitor before the next step: visit(t, delta) for t = 0..T.
template <typename Visitor>
void run_path(const McProblem& problem, std::uint64_t seed, long T,
              Visitor&& visit) {
  const int d = problem.spectrum.dim();
  const Vec sqrt_lambda = problem.spectrum.values().sqrt();
  const double noise_scale =
      problem.sigma2 > 0.0 ? std::sqrt(problem.sigma2) : 0.0;
  const double step_scale = problem.eta / static_cast<double>(problem.batch);

  CounterRng rng(seed);
  Vec delta = problem.w_delta0;
  Vec x(d), grad(d);

  visit(0L, delta);
  for (long t = 0; t < T; ++t) {
    grad.setZero();
    for (int e = 0; e < problem.batch; ++e) {
      for (int k = 0; k < d; ++k) x[k] = sqrt_lambda[k] * rng.next_gaussian();
      double inner = 0.0;
      for (int k = 0; k < d; ++k) inner += x[k] * delta[k];
      if (noise_scale > 0.0) inner += noise_scale * rng.next_gaussian();
      grad += inner * x;
    }
    delta -= step_scale * grad;
    visit(t + 1, delta);
  }
}

double excess_of_delta(const Spectrum& spectrum, const Vec& delta) {
  return 0.5 * compensated_dot(spectrum.values(), delta.square());
}

void parallel_for(long n, int jobs, const std::function<void(long)>& body) {
  jobs = std::max(1, jobs);
  if (jobs == 1 || n <= 1) {
    for (long i = 0; i < n; ++i) body(i);
    return;
  }
  std::atomic<long> next{0};
  auto worker = [&] {
    for (;;) {
      const long i = next.fetch_add(1);
      if (i >= n) return;
      body(i);
    }
  };
  std::vector<std::thread> pool;
  const int count = static_cast<int>(std::min<long>(jobs, n));
  pool.reserve(static_cast<size_t>(count));
  for (int i = 0; i < count; ++i) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
}

}  // namespace

PathResult sgd_path(const McProblem& problem, std::uint64_t seed, long T,
                    TailWindow window) {
  if (T < window.s + window.N) {
    throw std::invalid_argument("T must be >= s + N");
  }
  Vec tail_accum = Vec::Zero(problem.spectrum.dim());
  PathResult result;
  run_path(problem, seed, T, [&](long t, const Vec& delta) {
    if (t >= window.s && t < window.s + window.N) tail_accum += delta;
    if (t == T) result.final_excess = excess_of_delta(problem.spectrum, delta);
  });
  tail_accum /= static_cast<double>(window.N);
  result.tail_avg_excess = excess_of_delta(problem.spectrum, tail_accum);
  return result;
}

std::vector<PathResult> mc_paths(const McProblem& problem, int n_seeds, long T,
                                 TailWindow window, std::uint64_t base_seed,
                                 int jobs) {
  if (n_seeds < 1) throw std::invalid_argument("n_seeds must be >= 1");
  std::vector<PathResult> results(static_cast<size_t>(n_seeds));
  parallel_for(n_seeds, jobs, [&](long i) {
    results[static_cast<size_t>(i)] =
        sgd_path(problem, base_seed + static_cast<std::uint64_t>(i), T, window);
  });
  return results;
}

McEstimate mc_estimate(const McProblem& problem, int n_seeds, long T,
                       TailWindow window, std::uint64_t base_seed, int jobs) {
  if (n_seeds < 2) throw std::invalid_argument("n_seeds must be >= 2");
  const auto results = mc_paths(problem, n_seeds, T, window, base_seed, jobs);

  // Reduction happens in seed order no matter how the paths were scheduled.
  double sum = 0.0;
  for (const auto& r : results) sum += r.tail_avg_excess;
  const double mean = sum / n_seeds;
  double sq = 0.0;
  for (const auto& r : results) {
    const double dev = r.tail_avg_excess - mean;
    sq += dev * dev;
  }
  McEstimate estimate;
  estimate.mean = mean;
  estimate.std_error = std::sqrt(std::max(0.0, sq / (n_seeds - 1)) / n_seeds);
  estimate.n_seeds = n_seeds;
  return estimate;
}

void mc_second_moments(const McProblem& problem, int n_seeds, long T,
                       std::uint64_t base_seed, Mat& mean_out, Mat& stderr_out,
                       int jobs) {
  if (n_seeds < 2) throw std::invalid_argument("n_seeds must be >= 2");
  const int d = problem.spectrum.dim();
  Mat sum = Mat::Zero(T + 1, d);
  Mat sumsq = Mat::Zero(T + 1, d);

  // Seeds are processed in blocks; per-seed results are accumulated in
  // seed order so the totals do not depend on scheduling.
  const int block = std::min(n_seeds, 64);
  std::vector<Mat> per_seed(static_cast<size_t>(block));
  for (int start = 0; start < n_seeds; start += block) {
    const int count = std::min(block, n_seeds - start);
    parallel_for(count, jobs, [&](long i) {
      Mat& sq = per_seed[static_cast<size_t>(i)];
      sq.resize(T + 1, d);
      run_path(problem, base_seed + static_cast<std::uint64_t>(start + i), T,
               [&](long t, const Vec& delta) {
                 sq.row(t) = delta.square().matrix().transpose();
               });
    });
    for (int i = 0; i < count; ++i) {
      sum += per_seed[static_cast<size_t>(i)];
      sumsq += per_seed[static_cast<size_t>(i)].cwiseProduct(
          per_seed[static_cast<size_t>(i)]);
    }
  }

  const double n = static_cast<double>(n_seeds);
  mean_out = sum / n;
  stderr_out =
      ((sumsq - n * mean_out.cwiseProduct(mean_out)) / (n - 1.0) / n)
          .cwiseMax(0.0)
          .cwiseSqrt();
}

}  // namespace sgdrisk
