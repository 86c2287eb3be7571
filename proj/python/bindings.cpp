#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "sgdrisk/bounds.hpp"
#include "sgdrisk/engine.hpp"
#include "sgdrisk/mc.hpp"
#include "sgdrisk/oracle.hpp"
#include "sgdrisk/problem.hpp"
#include "sgdrisk/rng.hpp"

namespace py = pybind11;
using namespace sgdrisk;

namespace {

Mat track_matrix(const Trajectory& traj, bool bias) {
  Mat out(traj.states.size(), traj.spec.dim());
  for (size_t t = 0; t < traj.states.size(); ++t) {
    out.row(static_cast<Eigen::Index>(t)) =
        (bias ? traj.states[t].bias.m : traj.states[t].variance.m)
            .matrix()
            .transpose();
  }
  return out;
}

}  // namespace

PYBIND11_MODULE(_sgdrisk, m) {
  m.doc() =
      "Exact risk trajectories and closed-form bias/variance bounds for "
      "constant-step-size SGD on Gaussian linear regression";
  m.attr("RNG_ID") = kRngId;

  py::class_<Spectrum>(m, "Spectrum")
      .def(py::init<Vec>(), py::arg("values"))
      .def_property_readonly("values",
                             [](const Spectrum& s) { return s.values(); })
      .def_property_readonly("dim", &Spectrum::dim)
      .def_property_readonly("lambda_max", &Spectrum::lambda_max)
      .def_property_readonly("trace", &Spectrum::trace);

  m.def("power_law_spectrum", &power_law_spectrum, py::arg("d"),
        py::arg("exponent"), py::arg("scale") = 1.0);
  m.def("uniform_spectrum", &uniform_spectrum, py::arg("d"), py::arg("value"));
  m.def("spectrum_from_values", &spectrum_from_values, py::arg("values"));

  py::class_<TailWindow>(m, "TailWindow")
      .def(py::init<long, long>(), py::arg("s"), py::arg("N"))
      .def_readonly("s", &TailWindow::s)
      .def_readonly("N", &TailWindow::N);

  py::class_<Thresholds>(m, "Thresholds")
      .def_readonly("k_star", &Thresholds::k_star)
      .def_readonly("k_dagger", &Thresholds::k_dagger);

  m.def("max_stable_lr", &max_stable_lr, py::arg("spectrum"), py::arg("alpha"));
  m.def("thresholds", &thresholds, py::arg("spectrum"), py::arg("eta"),
        py::arg("window"));

  py::class_<ProblemSpec>(m, "ProblemSpec")
      .def(py::init<Spectrum, double, double, int, Vec>(), py::arg("spectrum"),
           py::arg("sigma2"), py::arg("eta"), py::arg("batch"),
           py::arg("m0_bias"))
      .def_property_readonly(
          "spectrum", [](const ProblemSpec& s) { return s.spectrum(); })
      .def_property_readonly("sigma2", &ProblemSpec::sigma2)
      .def_property_readonly("eta", &ProblemSpec::eta)
      .def_property_readonly("batch", &ProblemSpec::batch)
      .def_property_readonly("alpha", &ProblemSpec::alpha)
      .def_property_readonly("m0_bias",
                             [](const ProblemSpec& s) { return s.m0_bias(); })
      .def_property_readonly("stable", &ProblemSpec::stable)
      .def("with_sigma2", &ProblemSpec::with_sigma2)
      .def("with_batch", &ProblemSpec::with_batch);

  py::class_<Trajectory>(m, "Trajectory")
      .def_property_readonly("horizon", &Trajectory::horizon)
      .def("bias_moments",
           [](const Trajectory& t) { return track_matrix(t, true); })
      .def("variance_moments",
           [](const Trajectory& t) { return track_matrix(t, false); })
      .def("total_moments", [](const Trajectory& t) {
        return Mat(track_matrix(t, true) + track_matrix(t, false));
      });

  m.def("evolve_split", &evolve_split, py::arg("spec"), py::arg("T"));
  m.def(
      "risk_of_m",
      [](const Vec& m_vec, const ProblemSpec& spec) {
        return risk_of_m(StateVector{m_vec, 0}, spec);
      },
      py::arg("m"), py::arg("spec"));
  m.def(
      "excess_risk_of_m",
      [](const Vec& m_vec, const ProblemSpec& spec) {
        return excess_risk_of_m(StateVector{m_vec, 0}, spec);
      },
      py::arg("m"), py::arg("spec"));
  m.def("tail_risk_exact", &tail_risk_exact, py::arg("trajectory"),
        py::arg("window"));
  m.def("tail_risk_bound", &tail_risk_bound, py::arg("trajectory"),
        py::arg("window"));

  py::class_<TailExcessParts>(m, "TailExcessParts")
      .def_readonly("bias", &TailExcessParts::bias)
      .def_readonly("variance", &TailExcessParts::variance)
      .def_readonly("bound_excess", &TailExcessParts::bound_excess)
      .def_property_readonly("total", &TailExcessParts::total);
  m.def("tail_excess_parts", &tail_excess_parts, py::arg("spec"),
        py::arg("window"));

  py::class_<BiasBoundReport>(m, "BiasBoundReport")
      .def_readonly("term_head", &BiasBoundReport::term_head)
      .def_readonly("term_tail", &BiasBoundReport::term_tail)
      .def_readonly("term_cross", &BiasBoundReport::term_cross)
      .def_readonly("total", &BiasBoundReport::total)
      .def_readonly("k_star", &BiasBoundReport::k_star)
      .def_readonly("k_dagger", &BiasBoundReport::k_dagger)
      .def_readonly("stable", &BiasBoundReport::stable);

  py::class_<VarianceBoundReport>(m, "VarianceBoundReport")
      .def_readonly("band_head", &VarianceBoundReport::band_head)
      .def_readonly("band_mid", &VarianceBoundReport::band_mid)
      .def_readonly("band_tail", &VarianceBoundReport::band_tail)
      .def_readonly("prefactor", &VarianceBoundReport::prefactor)
      .def_readonly("total", &VarianceBoundReport::total)
      .def_readonly("k_star", &VarianceBoundReport::k_star)
      .def_readonly("k_dagger", &VarianceBoundReport::k_dagger)
      .def_readonly("stable", &VarianceBoundReport::stable);

  py::class_<LowerBoundReport>(m, "LowerBoundReport")
      .def_readonly("bias_lb", &LowerBoundReport::bias_lb)
      .def_readonly("variance_lb", &LowerBoundReport::variance_lb)
      .def_readonly("diagnostic_only", &LowerBoundReport::diagnostic_only)
      .def_readonly("k_star", &LowerBoundReport::k_star)
      .def_readonly("k_dagger", &LowerBoundReport::k_dagger)
      .def_readonly("stable", &LowerBoundReport::stable);

  m.def("bias_risk_bound", &bias_risk_bound, py::arg("spec"),
        py::arg("window"));
  m.def("variance_risk_bound", &variance_risk_bound, py::arg("spec"),
        py::arg("window"));
  m.def("bias_iterate_bound", &bias_iterate_bound, py::arg("spec"),
        py::arg("t"));
  m.def("variance_iterate_bound", &variance_iterate_bound, py::arg("spec"),
        py::arg("t"));
  m.def(
      "coupling_sum_check",
      [](const ProblemSpec& spec, long k) {
        const CouplingSumCheck check = coupling_sum_check(spec, k);
        return py::make_tuple(check.lhs, check.rhs);
      },
      py::arg("spec"), py::arg("k"));
  m.def("lower_bound_diagnostic", &lower_bound_diagnostic, py::arg("spec"),
        py::arg("window"));

  py::class_<McProblem>(m, "McProblem")
      .def(py::init<Spectrum, Vec, double, double, int>(), py::arg("spectrum"),
           py::arg("w_delta0"), py::arg("sigma2"), py::arg("eta"),
           py::arg("batch"))
      .def("to_spec", &McProblem::to_spec);

  py::class_<PathResult>(m, "PathResult")
      .def_readonly("final_excess", &PathResult::final_excess)
      .def_readonly("tail_avg_excess", &PathResult::tail_avg_excess);

  py::class_<McEstimate>(m, "McEstimate")
      .def_readonly("mean", &McEstimate::mean)
      .def_readonly("std_error", &McEstimate::std_error)
      .def_readonly("n_seeds", &McEstimate::n_seeds);

  m.def("sgd_path", &sgd_path, py::arg("problem"), py::arg("seed"),
        py::arg("T"), py::arg("window"));
  m.def("mc_estimate", &mc_estimate, py::arg("problem"), py::arg("n_seeds"),
        py::arg("T"), py::arg("window"), py::arg("base_seed"),
        py::arg("jobs") = 1);

  m.def("full_matrix_diag_trajectory", &full_matrix_diag_trajectory,
        py::arg("spec"), py::arg("M0"), py::arg("T"));
  m.def(
      "isserlis_check",
      [](const Spectrum& spectrum, const Mat& Sigma, long n_samples,
         std::uint64_t seed) {
        const IsserlisResult result =
            isserlis_check(spectrum, Sigma, n_samples, seed);
        return py::make_tuple(result.analytic, result.empirical,
                              result.max_rel_err);
      },
      py::arg("spectrum"), py::arg("Sigma"), py::arg("n_samples"),
      py::arg("seed"));
  m.def("dominance_check", &dominance_check, py::arg("spec"));
  m.def(
      "resolvent_bound_check",
      [](const ProblemSpec& spec) {
        const ResolventCheck check = resolvent_bound_check(spec);
        return py::make_tuple(check.lhs, check.rhs, check.holds);
      },
      py::arg("spec"));
}
