#include <doctest.h>

#include <cmath>

#include "encl/forward_heat.hpp"
#include "encl/transform.hpp"

using namespace encl;

namespace {

// A synthetic trace with one facet and a prescribed time profile.
BoundaryTrace synthetic_trace(int n_time, double T,
                              const std::function<double(double)>& u_of_t) {
  BoundaryTrace tr;
  tr.T = T;
  tr.dt = T / n_time;
  tr.u.resize(1, n_time + 1);
  tr.f.resize(1, n_time + 1);
  BoundaryFacet f;
  f.cell = 0;
  f.center = Point(1, 0, 0);
  f.normal = Point(1, 0, 0);
  f.measure = 1.0;
  tr.facets = {f};
  for (int k = 0; k <= n_time; ++k) {
    const double t = k * tr.dt;
    tr.times.push_back(t);
    tr.u(0, k) = u_of_t(t);
    tr.f(0, k) = 0.0;
  }
  return tr;
}

}  // namespace

TEST_CASE("trapezoid transform of constants and ramps") {
  const auto ones = synthetic_trace(256, 1.0, [](double) { return 1.0; });
  const double w10 = laplace_time(ones, 10.0).w[0];
  CHECK(w10 == doctest::Approx((1.0 - std::exp(-10.0)) / 10.0).epsilon(2e-4));

  const auto zeros = synthetic_trace(64, 1.0, [](double) { return 0.0; });
  CHECK(laplace_time(zeros, 10.0).w[0] == 0.0);

  const auto ramp = synthetic_trace(256, 1.0, [](double t) { return t; });
  const double exact = (1.0 - 21.0 * std::exp(-20.0)) / 400.0;
  CHECK(laplace_time(ramp, 20.0).w[0] == doctest::Approx(exact).epsilon(4e-4));
  // trapezoid theory: |error| <= dt^2/12 int |(e^{-tau t} t)''| dt ~ 1.3e-6
  CHECK(std::abs(laplace_time(ramp, 20.0).w[0] - exact) <= 1.5e-6);
}

TEST_CASE("transform rejects non-positive tau") {
  const auto tr = synthetic_trace(32, 1.0, [](double) { return 1.0; });
  CHECK_THROWS_AS(laplace_time(tr, 0.0), ConfigError);
  CHECK_THROWS_AS(laplace_time(tr, -3.0), ConfigError);
}

TEST_CASE("transform linearity") {
  const auto a = synthetic_trace(64, 1.0, [](double t) { return std::sin(t); });
  auto b = synthetic_trace(64, 1.0, [](double t) { return t * t; });
  auto combo = a;
  combo.u = 3.0 * a.u + 0.5 * b.u;
  combo.f = 3.0 * a.f + 0.5 * b.f;
  const double got = laplace_time(combo, 17.0).w[0];
  const double expect =
      3.0 * laplace_time(a, 17.0).w[0] + 0.5 * laplace_time(b, 17.0).w[0];
  CHECK(got == doctest::Approx(expect).epsilon(1e-14));
}

TEST_CASE("monotone decay in tau for nonnegative data") {
  const auto tr = synthetic_trace(64, 1.0, [](double t) { return 1.0 + t; });
  double prev = laplace_time(tr, 5.0).w[0];
  for (double tau : {10.0, 20.0, 40.0}) {
    const double w = laplace_time(tr, tau).w[0];
    CHECK(w <= prev);
    prev = w;
  }
}

TEST_CASE("trapezoid quadrature is second order") {
  const double exact = (1.0 - 21.0 * std::exp(-20.0)) / 400.0;
  const double e1 =
      std::abs(laplace_time(synthetic_trace(64, 1.0, [](double t) { return t; }),
                            20.0)
                   .w[0] -
               exact);
  const double e2 =
      std::abs(
          laplace_time(synthetic_trace(128, 1.0, [](double t) { return t; }),
                       20.0)
              .w[0] -
          exact);
  CHECK(e1 / e2 == doctest::Approx(4.0).epsilon(0.25));
}

TEST_CASE("resolution guard thresholds") {
  {
    const Grid g = build_grid(Domain::box(Point(0, 0, 0), Point(1, 1, 0), 2),
                              50, 1.0, 256);  // h = 0.02
    const auto r = resolution_guard(100.0, g);
    CHECK(r.ok);
    CHECK(r.sqrt_tau_h == doctest::Approx(0.2));
  }
  {
    const Grid g = build_grid(Domain::box(Point(0, 0, 0), Point(1, 1, 0), 2),
                              20, 1.0, 256);  // h = 0.05
    const auto r = resolution_guard(400.0, g);
    CHECK_FALSE(r.ok);
    CHECK(r.spatial_warning);
  }
  {
    const Grid g = build_grid(Domain::box(Point(0, 0, 0), Point(1, 1, 0), 2),
                              50, 1.0, 64);  // dt = 1/64
    const auto r = resolution_guard(100.0, g);
    CHECK_FALSE(r.ok);
    CHECK(r.temporal_warning);
    CHECK(r.tau_dt == doctest::Approx(100.0 / 64.0));
  }
}

TEST_CASE("matched scalar transform closed forms") {
  const double tau = 20.0, T = 1.0;
  const int n = 128;
  const double dt = T / n;
  const double beta = 1.0 - tau * dt;
  // dt sum_{k=1..n} beta^k for phi = 1: geometric series
  const double expect = dt * beta * (1.0 - std::pow(beta, n)) / (1.0 - beta);
  CHECK(matched_scalar_transform(PhiVariant::One, tau, dt, n) ==
        doctest::Approx(expect).epsilon(1e-13));
  CHECK(matched_tail_weight(tau, dt, n) ==
        doctest::Approx(std::pow(beta, n + 1)).epsilon(1e-13));
}

TEST_CASE("matched transforms approach the exact transform as dt shrinks") {
  const double tau = 25.0, T = 1.0;
  const double exact = phi_transform_exact(PhiVariant::One, tau, T);
  const double c1 = matched_scalar_transform(PhiVariant::One, tau, T / 256, 256);
  const double c2 = matched_scalar_transform(PhiVariant::One, tau, T / 512, 512);
  CHECK(std::abs(c2 - exact) < std::abs(c1 - exact));
}

TEST_CASE("piecewise-linear exponential integral is exact for lines") {
  std::vector<double> times;
  Eigen::VectorXd vals(9);
  for (int k = 0; k < 9; ++k) {
    times.push_back(k / 8.0);
    vals[k] = 2.0 + 3.0 * times[k];
  }
  const double tau = 7.0;
  // int_0^1 e^{-tau t}(2 + 3t) dt
  const double exact = 2.0 * (1.0 - std::exp(-tau)) / tau +
                       3.0 * (1.0 - (1.0 + tau) * std::exp(-tau)) / (tau * tau);
  CHECK(exp_weighted_pl_integral(times, vals, tau) ==
        doctest::Approx(exact).epsilon(1e-13));
}

TEST_CASE("geometric tau sweep") {
  const auto s = geometric_tau_sweep(10.0, 1.3, 12);
  REQUIRE(s.size() == 12);
  CHECK(s.front() == doctest::Approx(10.0));
  CHECK(s[1] / s[0] == doctest::Approx(1.3).epsilon(1e-12));
  CHECK(s.back() == doctest::Approx(10.0 * std::pow(1.3, 11)).epsilon(1e-12));
}
