#pragma once

#include <cmath>

namespace encl {

// Modified Bessel functions used by the 2D probe solutions and the layer
// potential kernels.  Backed by GSL's scaled evaluations so arguments far
// past the exp overflow threshold stay usable through the log interface.

double bessel_i0(double x);
double bessel_i1(double x);
double bessel_k0(double x);
double bessel_k1(double x);

/// log I0(x), valid for any x >= 0.
double log_bessel_i0(double x);
/// log I1(x), x > 0.
double log_bessel_i1(double x);
/// log K0(x), x > 0.
double log_bessel_k0(double x);
/// log K1(x), x > 0.
double log_bessel_k1(double x);

/// log(2 sinh(x)) computed without overflow, x > 0.
inline double log_two_sinh(double x) {
  if (x < 1e-8) return std::log(2.0 * x);
  return x + std::log1p(-std::exp(-2.0 * x));
}

}  // namespace encl
