#include <doctest.h>

#include <cmath>

#include "sgdrisk/errors.hpp"
#include "sgdrisk/oracle.hpp"
#include "testutil.hpp"

using namespace sgdrisk;

namespace {

Mat random_psd(CounterRng& rng, int d) {
  Mat g(d, d);
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) g(i, j) = rng.next_gaussian();
  }
  return g * g.transpose() / static_cast<double>(d);
}

}  // namespace

TEST_SUITE_BEGIN("oracle");

TEST_CASE("zero covariance without noise stays zero") {
  CounterRng rng(71);
  const auto spec = testutil::random_stable_spec(rng).with_sigma2(0.0);
  const MatrixState next =
      full_matrix_step(MatrixState{Mat::Zero(spec.dim(), spec.dim()), 0}, spec);
  CHECK(next.M.isZero(0.0));
  CHECK(next.t == 1);
}

TEST_CASE("scalar matrix recursion equals the vector step") {
  for (double sigma2 : {0.0, 0.7}) {
    const ProblemSpec spec(spectrum_from_values({1.0}), sigma2, 0.1, 1,
                           Vec::Constant(1, 1.0));
    MatrixState state{Mat::Constant(1, 1, 1.0), 0};
    StateVector vec{Vec::Constant(1, 1.0), 0};
    for (int t = 0; t < 20; ++t) {
      state = full_matrix_step(state, spec);
      vec = step_m(vec, spec);
      CHECK(state.M(0, 0) == doctest::Approx(vec.m[0]).epsilon(1e-14));
    }
  }
}

TEST_CASE("matrix dimension mismatch is rejected") {
  const ProblemSpec spec(spectrum_from_values({1.0, 0.5}), 0.0, 0.1, 1,
                         Vec::Zero(2));
  CHECK_THROWS_AS(full_matrix_step(MatrixState{Mat::Zero(3, 3), 0}, spec),
                  std::invalid_argument);
}

TEST_CASE("full-matrix diagonal matches the vector recursion") {
  CounterRng rng(72);
  testutil::SpecOptions opt;
  opt.dims = {5};
  for (int trial = 0; trial < 5; ++trial) {
    const auto spec = testutil::random_stable_spec(rng, opt);
    const Mat M0 = random_psd(rng, 5);
    const Mat diags = full_matrix_diag_trajectory(spec, M0, 100);

    StateVector vec{M0.diagonal().array(), 0};
    for (long t = 0; t <= 100; ++t) {
      for (int k = 0; k < 5; ++k) {
        const double ref = diags(t, k);
        const double denom = std::max({std::abs(ref), std::abs(vec.m[k]), 1e-30});
        CHECK(std::abs(ref - vec.m[k]) / denom <= 1e-10);
      }
      if (t < 100) vec = step_m(vec, spec);
    }
  }
}

TEST_CASE("covariance stays PSD along stable trajectories") {
  CounterRng rng(73);
  testutil::SpecOptions opt;
  opt.dims = {4};
  const auto spec = testutil::random_stable_spec(rng, opt);
  MatrixState state{random_psd(rng, 4), 0};
  for (int t = 0; t < 200; ++t) {
    state = full_matrix_step(state, spec);
    CHECK(min_eigenvalue_ratio(state.M) >= -1e-10);
  }
}

TEST_CASE("diagonal of the output ignores off-diagonal input entries") {
  CounterRng rng(74);
  testutil::SpecOptions opt;
  opt.dims = {4};
  const auto spec = testutil::random_stable_spec(rng, opt);
  const Mat M0 = random_psd(rng, 4);
  Mat perturbed = M0;
  perturbed(0, 1) += 0.3;
  perturbed(1, 0) += 0.3;
  perturbed(2, 3) -= 0.15;
  perturbed(3, 2) -= 0.15;

  const Vec base = full_matrix_step(MatrixState{M0, 0}, spec).M.diagonal();
  const Vec other =
      full_matrix_step(MatrixState{perturbed, 0}, spec).M.diagonal();
  for (int k = 0; k < 4; ++k) {
    const double denom = std::max(std::abs(base[k]), 1e-30);
    CHECK(std::abs(base[k] - other[k]) / denom <= 1e-14);
  }
}

TEST_CASE("scalar fourth moment is 3") {
  const IsserlisResult result = isserlis_check(
      spectrum_from_values({1.0}), Mat::Constant(1, 1, 1.0), 10000, 5);
  CHECK(result.analytic(0, 0) == 3.0);
  CHECK(result.max_rel_err < 0.2);
}

TEST_CASE("zero Sigma gives exact zeros") {
  const IsserlisResult result = isserlis_check(
      spectrum_from_values({1.0, 0.5}), Mat::Zero(2, 2), 10000, 5);
  CHECK(result.analytic.isZero(0.0));
  CHECK(result.empirical.isZero(0.0));
  CHECK(result.max_rel_err == 0.0);
}

TEST_CASE("fourth-moment check argument errors") {
  const Spectrum s = spectrum_from_values({1.0, 0.5});
  CHECK_THROWS_AS(isserlis_check(s, Mat::Zero(2, 2), 100, 5),
                  std::invalid_argument);
  Mat not_psd(2, 2);
  not_psd << 1.0, 2.0, 2.0, 1.0;
  CHECK_THROWS_AS(isserlis_check(s, not_psd, 10000, 5), std::invalid_argument);
  CHECK_THROWS_AS(isserlis_check(s, Mat::Zero(3, 3), 10000, 5),
                  std::invalid_argument);
}

TEST_CASE("fourth-moment error shrinks with the sample count") {
  CounterRng rng(75);
  const Spectrum spectrum = power_law_spectrum(3, 0.5, 1.0);
  const Mat Sigma = random_psd(rng, 3);
  const auto snapshots =
      isserlis_check_snapshots(spectrum, Sigma, {10000, 100000}, 9);
  CHECK(snapshots[1].max_rel_err < snapshots[0].max_rel_err);
  CHECK(snapshots[1].max_rel_err < 0.05);
}

TEST_CASE("operator dominance holds for stable specs") {
  CounterRng rng(76);
  testutil::SpecOptions opt;
  opt.batches = {1, 2, 4, 8, 64};
  for (int trial = 0; trial < 40; ++trial) {
    const auto spec = testutil::random_stable_spec(rng, opt);
    CHECK(dominance_check(spec));
  }
  const ProblemSpec tiny(spectrum_from_values({2.0, 1.0}), 0.0, 1e-300, 1,
                         Vec::Zero(2));
  CHECK(dominance_check(tiny));
}

TEST_CASE("scalar resolvent bound") {
  const ProblemSpec spec(spectrum_from_values({1.0}), 0.0, 0.1, 1,
                         Vec::Constant(1, 1.0));
  const ResolventCheck check = resolvent_bound_check(spec);
  CHECK(check.lhs[0] == doctest::Approx(1.0 / 0.17).epsilon(1e-13));
  CHECK(check.rhs[0] == doctest::Approx(12.5).epsilon(1e-14));
  CHECK(check.holds);
}

TEST_CASE("resolvent bound on a zero spectrum") {
  const ProblemSpec spec(uniform_spectrum(2, 0.0), 0.0, 0.1, 1, Vec::Zero(2));
  const ResolventCheck check = resolvent_bound_check(spec);
  CHECK((check.lhs == 0.0).all());
  CHECK(check.holds);
}

TEST_CASE("resolvent bound holds across random stable specs") {
  CounterRng rng(77);
  for (int trial = 0; trial < 40; ++trial) {
    const auto spec = testutil::random_stable_spec(rng);
    CHECK(resolvent_bound_check(spec).holds);
  }
}

TEST_SUITE_END();
