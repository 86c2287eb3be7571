#pragma once

#include "sgdrisk/spectrum.hpp"

namespace sgdrisk {

/// Tail-averaging window: the first s iterates are discarded, the next N
/// are averaged.
struct TailWindow {
  long s = 0;
  long N = 1;

  TailWindow() = default;
  TailWindow(long s_, long N_);
};

/// Eigenvalue band edges for the closed-form bounds:
///   k_star   = max{ j : lambda_j >= 1/(eta*N) }        (0 if none)
///   k_dagger = max{ j : lambda_j >= 1/(eta*(s+N)) }    (0 if none)
/// Indices are 1-based counts into the descending spectrum; ties at the
/// cutoff land in the head band.
struct Thresholds {
  int k_star = 0;
  int k_dagger = 0;
};

/// Constant-step-size SGD on Gaussian linear regression, expressed in the
/// covariance eigenbasis. m0_bias holds the squared eigen-coordinates of
/// w0 - w*; the rotation itself is never materialized here.
class ProblemSpec {
 public:
  ProblemSpec(Spectrum spectrum, double sigma2, double eta, int batch,
              Vec m0_bias);

  const Spectrum& spectrum() const { return spectrum_; }
  int dim() const { return spectrum_.dim(); }
  double sigma2() const { return sigma2_; }
  double eta() const { return eta_; }
  int batch() const { return batch_; }
  double alpha() const { return 2.0 / batch_; }
  const Vec& m0_bias() const { return m0_bias_; }

  /// eta <= 1 / (lambda_max + alpha * tr(H)). All-zero spectra count as
  /// stable (nothing moves).
  bool stable() const;

  /// 1 - eta * alpha * tr(H); positive whenever the spec is stable.
  double bound_prefactor_denom() const;

  ProblemSpec with_sigma2(double sigma2) const;
  ProblemSpec with_batch(int batch) const;

 private:
  Spectrum spectrum_;
  double sigma2_;
  double eta_;
  int batch_;
  Vec m0_bias_;
};

/// Largest stable step size, 1 / (lambda_max + alpha * tr(H)).
/// Throws degenerate_error when the denominator is zero.
double max_stable_lr(const Spectrum& spectrum, double alpha);

Thresholds thresholds(const Spectrum& spectrum, double eta, TailWindow window);

/// Throws stability_error unless spec.stable().
void require_stable(const ProblemSpec& spec, const char* where);

}  // namespace sgdrisk
