#include "sgdrisk/problem.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "sgdrisk/errors.hpp"

namespace sgdrisk {

TailWindow::TailWindow(long s_, long N_) : s(s_), N(N_) {
  if (s < 0) throw std::invalid_argument("tail window s must be >= 0");
  if (N < 1) throw std::invalid_argument("tail window N must be >= 1");
}

ProblemSpec::ProblemSpec(Spectrum spectrum, double sigma2, double eta,
                         int batch, Vec m0_bias)
    : spectrum_(std::move(spectrum)),
      sigma2_(sigma2),
      eta_(eta),
      batch_(batch),
      m0_bias_(std::move(m0_bias)) {
  if (!(sigma2_ >= 0.0)) throw std::invalid_argument("sigma2 must be >= 0");
  if (!(eta_ > 0.0)) throw std::invalid_argument("eta must be > 0");
  if (batch_ < 1) throw std::invalid_argument("batch must be >= 1");
  if (m0_bias_.size() != spectrum_.dim()) {
    throw std::invalid_argument("m0_bias length must match spectrum dimension");
  }
  for (Eigen::Index j = 0; j < m0_bias_.size(); ++j) {
    if (!(m0_bias_[j] >= 0.0)) {
      throw std::invalid_argument("m0_bias entries must be >= 0");
    }
  }
}

bool ProblemSpec::stable() const {
  const double denom = spectrum_.lambda_max() + alpha() * spectrum_.trace();
  if (denom <= 0.0) return true;  // zero spectrum: nothing moves
  return eta_ <= 1.0 / denom;
}

double ProblemSpec::bound_prefactor_denom() const {
  return 1.0 - eta_ * alpha() * spectrum_.trace();
}

ProblemSpec ProblemSpec::with_sigma2(double sigma2) const {
  return ProblemSpec(spectrum_, sigma2, eta_, batch_, m0_bias_);
}

ProblemSpec ProblemSpec::with_batch(int batch) const {
  return ProblemSpec(spectrum_, sigma2_, eta_, batch, m0_bias_);
}

double max_stable_lr(const Spectrum& spectrum, double alpha) {
  if (!(alpha >= 0.0)) throw std::invalid_argument("alpha must be >= 0");
  const double denom = spectrum.lambda_max() + alpha * spectrum.trace();
  if (denom <= 0.0) {
    throw degenerate_error(
        "max stable step size undefined: lambda_max + alpha*tr(H) == 0");
  }
  return 1.0 / denom;
}

Thresholds thresholds(const Spectrum& spectrum, double eta, TailWindow window) {
  if (!(eta > 0.0)) throw std::invalid_argument("eta must be > 0");
  const double cut_star = 1.0 / (eta * static_cast<double>(window.N));
  const double cut_dagger =
      1.0 / (eta * static_cast<double>(window.s + window.N));
  Thresholds out;
  const Vec& lambdas = spectrum.values();
  for (Eigen::Index j = 0; j < lambdas.size(); ++j) {
    if (lambdas[j] >= cut_star) out.k_star = static_cast<int>(j) + 1;
    if (lambdas[j] >= cut_dagger) out.k_dagger = static_cast<int>(j) + 1;
  }
  return out;
}

void require_stable(const ProblemSpec& spec, const char* where) {
  if (!spec.stable()) {
    throw stability_error(std::string(where) +
                          ": step size violates eta <= 1/(lambda_max + "
                          "alpha*tr(H))");
  }
}

}  // namespace sgdrisk
