#include <doctest.h>

#include <cmath>
#include <initializer_list>

#include "encl/log_real.hpp"
#include "encl/special.hpp"

using namespace encl;

TEST_CASE("modified Bessel reference values") {
  // Abramowitz & Stegun 9.8 tables
  CHECK(bessel_i0(1.0) == doctest::Approx(1.2660658777520084).epsilon(1e-12));
  CHECK(bessel_i1(1.0) == doctest::Approx(0.5651591039924850).epsilon(1e-12));
  CHECK(bessel_k0(1.0) == doctest::Approx(0.4210244382407083).epsilon(1e-12));
  CHECK(bessel_k1(1.0) == doctest::Approx(0.6019072301972346).epsilon(1e-12));
  CHECK(bessel_i0(0.0) == doctest::Approx(1.0));
}

TEST_CASE("Bessel Wronskian identity") {
  // I0(x) K1(x) + I1(x) K0(x) = 1/x
  for (double x : {0.5, 1.0, 3.0, 10.0, 50.0}) {
    CHECK(bessel_i0(x) * bessel_k1(x) + bessel_i1(x) * bessel_k0(x) ==
          doctest::Approx(1.0 / x).epsilon(1e-12));
  }
}

TEST_CASE("log-scaled Bessel evaluation far past overflow") {
  // I0(x) ~ e^x / sqrt(2 pi x): check the log form at x = 700 and beyond
  for (double x : {100.0, 700.0, 2000.0}) {
    const double asym = x - 0.5 * std::log(2.0 * M_PI * x);
    CHECK(log_bessel_i0(x) == doctest::Approx(asym).epsilon(1e-3));
    // K0(x) ~ sqrt(pi/(2x)) e^{-x}
    const double kasym = -x + 0.5 * std::log(M_PI / (2.0 * x));
    CHECK(log_bessel_k0(x) == doctest::Approx(kasym).epsilon(1e-3));
  }
  // consistency with the direct values where both are representable
  for (double x : {0.5, 2.0, 20.0}) {
    CHECK(log_bessel_i0(x) ==
          doctest::Approx(std::log(bessel_i0(x))).epsilon(1e-12));
    CHECK(log_bessel_k1(x) ==
          doctest::Approx(std::log(bessel_k1(x))).epsilon(1e-12));
  }
}

TEST_CASE("log_two_sinh") {
  CHECK(log_two_sinh(2.0) ==
        doctest::Approx(std::log(2.0 * std::sinh(2.0))).epsilon(1e-13));
  CHECK(log_two_sinh(1e-10) ==
        doctest::Approx(std::log(2e-10)).epsilon(1e-8));
  CHECK(log_two_sinh(800.0) ==
        doctest::Approx(800.0 + std::log(1.0)).epsilon(1e-12));
}

TEST_CASE("LogReal round trips and ordering") {
  const LogReal a = LogReal::from_double(-3.5);
  CHECK(a.sign() == -1);
  CHECK(a.to_double() == doctest::Approx(-3.5).epsilon(1e-15));
  CHECK(LogReal::from_double(0.0).is_zero());
  CHECK(LogReal::zero().to_double() == 0.0);
}

TEST_CASE("LogReal field operations") {
  const LogReal a = LogReal::from_double(2.0);
  const LogReal b = LogReal::from_double(-6.0);
  CHECK((a * b).to_double() == doctest::Approx(-12.0).epsilon(1e-14));
  CHECK((b / a).to_double() == doctest::Approx(-3.0).epsilon(1e-14));
  CHECK((a + b).to_double() == doctest::Approx(-4.0).epsilon(1e-14));
  CHECK((a - b).to_double() == doctest::Approx(8.0).epsilon(1e-14));
  CHECK((-b).to_double() == doctest::Approx(6.0).epsilon(1e-14));
  // exact cancellation yields the zero element, not -inf noise
  CHECK((a - a).is_zero());
  CHECK((LogReal::zero() + a).to_double() == doctest::Approx(2.0));
}

TEST_CASE("LogReal sums far past native range") {
  // e^{800} * e^{800} / e^{1590} is representable even though the
  // intermediates are not
  const LogReal big1(1, 800.0);
  const LogReal big2(1, 800.0);
  const LogReal div(1, 1590.0);
  const double v = ((big1 * big2) / div).to_double();
  CHECK(v == doctest::Approx(std::exp(10.0)).epsilon(1e-12));
  // additions keep the max exponent
  const LogReal s = big1 + big2;
  CHECK(s.sign() == 1);
  CHECK(s.log_abs() == doctest::Approx(800.0 + std::log(2.0)).epsilon(1e-13));
}

TEST_CASE("log_scaled_exp") {
  CHECK(log_scaled_exp(3.0, -2.0).to_double() ==
        doctest::Approx(-2.0 * std::exp(3.0)).epsilon(1e-13));
  CHECK(log_scaled_exp(1000.0, 0.0).is_zero());
  const LogReal huge = log_scaled_exp(1000.0, 1.5);
  CHECK(huge.sign() == 1);
  CHECK(huge.log_abs() ==
        doctest::Approx(1000.0 + std::log(1.5)).epsilon(1e-13));
}
