#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>

namespace sgdrisk {

using Vec = Eigen::ArrayXd;
using Mat = Eigen::MatrixXd;

/// Kahan-compensated sum; accumulation error stays O(eps) regardless of d.
inline double compensated_sum(const Vec& v) {
  double sum = 0.0, carry = 0.0;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    const double y = v[i] - carry;
    const double t = sum + y;
    carry = (t - sum) - y;
    sum = t;
  }
  return sum;
}

inline double compensated_dot(const Vec& a, const Vec& b) {
  double sum = 0.0, carry = 0.0;
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    const double y = a[i] * b[i] - carry;
    const double t = sum + y;
    carry = (t - sum) - y;
    sum = t;
  }
  return sum;
}

/// sum_{r=1}^{n} rho^r for rho = 1 - eta*lambda, with the rho -> 1 limit
/// branch (returns n) when |eta*lambda| < 1e-14.
inline double geometric_tail_sum(double eta_lambda, long n) {
  if (n <= 0) return 0.0;
  if (std::abs(eta_lambda) < 1e-14) return static_cast<double>(n);
  const double rho = 1.0 - eta_lambda;
  return rho * (1.0 - std::pow(rho, static_cast<double>(n))) / eta_lambda;
}

/// FNV-1a over a byte string; used for parameter digests in verdict logs.
inline std::uint64_t fnv1a64(const std::string& s) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

}  // namespace sgdrisk
