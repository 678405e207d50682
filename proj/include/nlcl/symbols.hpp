#pragma once

// Scalar Fourier symbols of the model and the smooth cutoff profile.

#include <cmath>
#include <stdexcept>

namespace nlcl {

/// Dissipation symbol |xi|^2 / (1 + |xi|^2)^s1 of the linear part.
inline double sigma(double xi_sq, double s1) {
  if (xi_sq < 0.0) throw std::domain_error("sigma: xi_sq must be nonnegative");
  if (xi_sq == 0.0) return 0.0;
  return xi_sq * std::exp(-s1 * std::log1p(xi_sq));
}

/// Bessel potential symbol (1 + |xi|^2)^(-s).
inline double bessel(double xi_sq, double s) {
  if (xi_sq < 0.0) throw std::domain_error("bessel: xi_sq must be nonnegative");
  return std::exp(-s * std::log1p(xi_sq));
}

/// phi_1(z) = (e^z - 1) / z, Taylor series for |z| < 1e-4.
inline double phi1(double z) {
  if (std::abs(z) < 1e-4) return 1.0 + z * (0.5 + z * (1.0 / 6.0 + z / 24.0));
  return std::expm1(z) / z;
}

/// phi_2(z) = (e^z - 1 - z) / z^2.
inline double phi2(double z) {
  if (std::abs(z) < 1.0) {
    // sum_k z^k / (k + 2)!
    double term = 0.5, sum = 0.5;
    for (int k = 1; k < 30; ++k) {
      term *= z / static_cast<double>(k + 2);
      sum += term;
      if (std::abs(term) < 1e-18 * std::abs(sum)) break;
    }
    return sum;
  }
  return (std::expm1(z) - z) / (z * z);
}

/// C-infinity ramp: 0 for s <= 0, 1 for s >= 1,
/// e^{-1/s} / (e^{-1/s} + e^{-1/(1-s)}) in between.
inline double smooth_ramp(double s) {
  if (s <= 0.0) return 0.0;
  if (s >= 1.0) return 1.0;
  const double a = std::exp(-1.0 / s);
  const double b = std::exp(-1.0 / (1.0 - s));
  return a / (a + b);
}

}  // namespace nlcl
