#include "encl/special.hpp"

#include <gsl/gsl_sf_bessel.h>

namespace encl {

double bessel_i0(double x) { return gsl_sf_bessel_I0(x); }
double bessel_i1(double x) { return gsl_sf_bessel_I1(x); }
double bessel_k0(double x) { return gsl_sf_bessel_K0(x); }
double bessel_k1(double x) { return gsl_sf_bessel_K1(x); }

double log_bessel_i0(double x) {
  return x + std::log(gsl_sf_bessel_I0_scaled(x));
}

double log_bessel_i1(double x) {
  return x + std::log(gsl_sf_bessel_I1_scaled(x));
}

double log_bessel_k0(double x) {
  return -x + std::log(gsl_sf_bessel_K0_scaled(x));
}

double log_bessel_k1(double x) {
  return -x + std::log(gsl_sf_bessel_K1_scaled(x));
}

}  // namespace encl
