#include <doctest.h>

#include <cmath>

#include "encl/forward_heat.hpp"
#include "encl/indicator.hpp"
#include "encl/pipeline.hpp"

using namespace encl;

namespace {

InclusionScene disk_scene() {
  InclusionScene s;
  s.domain = Domain::ball(Point::Zero(), 1.0, 2);
  s.inclusion = Inclusion::ball(Point(0.2, 0.0, 0.0), 0.3);
  return s;
}

// Samples with log|I(tau)| = log(c) + b log(tau) + a 2 sqrt(tau).
std::vector<IndicatorSample> synthetic_sweep(double a, double b, double log_c,
                                             int sign, int count = 12) {
  std::vector<IndicatorSample> out;
  double tau = 10.0;
  for (int j = 0; j < count; ++j, tau *= 1.3) {
    IndicatorSample s;
    s.tau = tau;
    s.sign = sign;
    s.log_abs = log_c + b * std::log(tau) + a * 2.0 * std::sqrt(tau);
    s.log_abs_corrected = s.log_abs;
    s.theorem = "T1.1";
    out.push_back(s);
  }
  return out;
}

}  // namespace

TEST_CASE("extraction recovers synthetic decay rates exactly") {
  // I(tau) = tau^{-2} e^{-2 sqrt(tau) 0.5}
  const auto dec = extract_limit(synthetic_sweep(-0.5, -2.0, 0.0, 1));
  CHECK(dec.estimate == doctest::Approx(-0.5).epsilon(1e-10));
  CHECK(dec.indicator_sign == 1);
  CHECK(dec.sign_consistent);

  // I(tau) = tau^{3} e^{+2 sqrt(tau) 0.42}, negative sign
  const auto grow = extract_limit(synthetic_sweep(0.42, 3.0, 1.0, -1));
  CHECK(grow.estimate == doctest::Approx(0.42).epsilon(1e-10));
  CHECK(grow.indicator_sign == -1);
}

TEST_CASE("pairwise slopes converge toward the fitted rate") {
  // without a prefactor the pairwise differences are exact
  const auto pure = extract_limit(synthetic_sweep(-0.5, 0.0, 0.0, 1));
  CHECK(pure.pairwise_estimate == doctest::Approx(-0.5).epsilon(1e-10));
  CHECK_FALSE(pure.estimator_disagreement);

  // a strong log-tau prefactor biases the pairwise estimator; the fit
  // separates it and the disagreement between the two is flagged
  const auto r = extract_limit(synthetic_sweep(-0.5, -2.0, 0.0, 1));
  REQUIRE(r.slopes.size() == r.taus.size() - 1);
  CHECK(std::abs(r.slopes.back() + 0.5) < std::abs(r.slopes.front() + 0.5));
  CHECK(r.pairwise_estimate == doctest::Approx(-0.5).epsilon(0.4));
  CHECK(r.estimator_disagreement);
}

TEST_CASE("indeterminate samples are dropped") {
  auto sweep = synthetic_sweep(-0.5, -2.0, 0.0, 1);
  sweep[2].sign = 0;
  const auto r = extract_limit(sweep);
  CHECK(r.estimate == doctest::Approx(-0.5).epsilon(1e-10));
  CHECK(r.taus.size() == sweep.size() - 1);
}

TEST_CASE("extraction failure modes") {
  CHECK_THROWS_AS(extract_limit(synthetic_sweep(-0.5, -2.0, 0.0, 1, 3)),
                  InsufficientDataError);

  auto all_zero = synthetic_sweep(-0.5, -2.0, 0.0, 1);
  for (auto& s : all_zero) s.sign = 0;
  CHECK_THROWS_AS(extract_limit(all_zero), InsufficientDataError);

  // sign flip near the end leaves no usable suffix
  auto flippy = synthetic_sweep(-0.5, -2.0, 0.0, 1);
  flippy[flippy.size() - 3].sign = -1;
  CHECK_THROWS_AS(extract_limit(flippy), SignInconsistencyError);

  // early flip is tolerated: constant-sign suffix is long enough
  auto early = synthetic_sweep(-0.5, -2.0, 0.0, 1);
  early[1].sign = -1;
  const auto r = extract_limit(early);
  CHECK_FALSE(r.sign_consistent);
  CHECK(r.estimate == doctest::Approx(-0.5).epsilon(1e-10));
}

TEST_CASE("extraction requires increasing tau") {
  auto sweep = synthetic_sweep(-0.5, -2.0, 0.0, 1);
  std::swap(sweep[3].tau, sweep[4].tau);
  CHECK_THROWS_AS(extract_limit(sweep), ConfigError);
}

TEST_CASE("no-contrast indicator is sign-indeterminate") {
  const InclusionScene s = disk_scene();
  const Grid grid = build_grid(s.domain, 48, 1.0, 96);
  const auto fwd = solve_forward(grid, ConductivitySpec::identity(2), s,
                                 FluxSpec::constant_flux(1.0));
  const double tau = 50.0;
  const TransformedTrace wg = scheme_matched_transform(fwd.trace, tau);
  const ProbeField v = solve_neumann_probe(grid, wg, tau);
  const IndicatorSample sample = assemble_indicator(wg, v, grid, "T1.1");
  CHECK(sample.sign == 0);
}

TEST_CASE("A2 contrast gives a positive indicator, A1 negative") {
  const InclusionScene s = disk_scene();
  const Grid grid = build_grid(s.domain, 64, 1.0, 128);
  for (double kappa : {2.0, 0.5}) {
    const auto fwd = solve_forward(grid, ConductivitySpec::scalar(kappa, 2), s,
                                   FluxSpec::constant_flux(1.0));
    for (double tau : {30.0, 60.0}) {
      const TransformedTrace wg = scheme_matched_transform(fwd.trace, tau);
      const ProbeField v = solve_neumann_probe(grid, wg, tau);
      const IndicatorSample sample = assemble_indicator(wg, v, grid, "T1.1");
      CHECK(sample.sign == (kappa > 1.0 ? 1 : -1));
    }
  }
}

TEST_CASE("indicator assembly validates its inputs") {
  const InclusionScene s = disk_scene();
  const Grid grid = build_grid(s.domain, 32, 1.0, 64);
  TransformedTrace wg;
  wg.tau = 25.0;
  wg.w = Eigen::VectorXd::Zero(3);  // wrong facet count
  wg.g = Eigen::VectorXd::Zero(3);
  const ProbeField plane = ProbeField::plane(Point(1, 0, 0), 25.0, 2);
  CHECK_THROWS_AS(assemble_indicator(wg, plane, grid, "T1.2"), ConfigError);

  const ProbeField other = ProbeField::plane(Point(1, 0, 0), 30.0, 2);
  TransformedTrace full;
  full.tau = 25.0;
  full.w = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(grid.facets().size()));
  full.g = full.w;
  CHECK_THROWS_AS(assemble_indicator(full, other, grid, "T1.2"), ConfigError);
}

TEST_CASE("flux scaling shifts log|I| by 2 log c and leaves the slope alone") {
  const InclusionScene s = disk_scene();
  const Grid grid = build_grid(s.domain, 48, 1.0, 96);
  const double c = 7.0;
  auto sweep_for = [&](double amplitude) {
    const auto fwd = solve_forward(grid, ConductivitySpec::scalar(2.0, 2), s,
                                   FluxSpec::constant_flux(amplitude));
    std::vector<IndicatorSample> samples;
    double tau = 10.0;
    for (int j = 0; j < 6; ++j, tau *= 1.3) {
      const TransformedTrace wg = scheme_matched_transform(fwd.trace, tau);
      const ProbeField v = solve_neumann_probe(grid, wg, tau);
      samples.push_back(assemble_indicator(wg, v, grid, "T1.1"));
    }
    return samples;
  };
  const auto base = sweep_for(1.0);
  const auto scaled = sweep_for(c);
  for (std::size_t j = 0; j < base.size(); ++j) {
    CHECK(scaled[j].sign == base[j].sign);
    CHECK(scaled[j].log_abs - base[j].log_abs ==
          doctest::Approx(2.0 * std::log(c)).epsilon(1e-8));
  }
  const auto e1 = extract_limit(base);
  const auto e2 = extract_limit(scaled);
  CHECK(e2.estimate == doctest::Approx(e1.estimate).epsilon(1e-8));
}

TEST_CASE("basic identity vanishes without contrast") {
  const InclusionScene s = disk_scene();
  const Grid grid = build_grid(s.domain, 48, 1.0, 96);
  const double tau = 25.0;
  ForwardOptions opt;
  opt.store_history = false;
  opt.transform_taus = {tau};
  const auto fwd =
      solve_forward(grid, ConductivitySpec::identity(2), s,
                    FluxSpec::constant_flux(1.0), std::nullopt, nullptr, opt);
  const TransformedTrace wg = scheme_matched_transform(fwd.trace, tau);
  const auto rep = verify_basic_identity(grid, ConductivitySpec::identity(2), s,
                                         wg, fwd.volume_transforms[0],
                                         fwd.state.final_field, tau);
  CHECK(std::abs(rep.lhs) <= 1e-10);
  CHECK(std::abs(rep.volume_term) <= 1e-12);
}

TEST_CASE("basic identity closes to solver tolerance with contrast") {
  const InclusionScene s = disk_scene();
  const Grid grid = build_grid(s.domain, 64, 1.0, 128);
  const double tau = 25.0;
  ForwardOptions opt;
  opt.store_history = false;
  opt.transform_taus = {tau};
  const auto fwd =
      solve_forward(grid, ConductivitySpec::scalar(2.0, 2), s,
                    FluxSpec::constant_flux(1.0), std::nullopt, nullptr, opt);
  const TransformedTrace wg = scheme_matched_transform(fwd.trace, tau);
  const auto rep = verify_basic_identity(grid, ConductivitySpec::scalar(2.0, 2),
                                         s, wg, fwd.volume_transforms[0],
                                         fwd.state.final_field, tau);
  CHECK(rep.relative_mismatch <= 1e-6);
  CHECK(rep.remainder_fraction <= 0.01);
}

TEST_CASE("two-sided bounds with exact scalar algebra") {
  const InclusionScene s = disk_scene();
  const Grid grid = build_grid(s.domain, 64, 1.0, 128);
  const double tau = 25.0;
  const auto fwd = solve_forward(grid, ConductivitySpec::scalar(2.0, 2), s,
                                 FluxSpec::constant_flux(1.0));
  const TransformedTrace wg = scheme_matched_transform(fwd.trace, tau);

  // tensor 2I: L = E/2, U = E
  const auto a2 = verify_two_sided_bounds(grid, ConductivitySpec::scalar(2.0, 2),
                                          s, wg, tau);
  CHECK(a2.holds);
  CHECK(a2.upper == doctest::Approx(2.0 * a2.lower).epsilon(1e-12));
  CHECK(a2.lower > 0.0);

  // tensor 0.5I: L = -E, U = -E/2, both negative
  const auto fwd1 = solve_forward(grid, ConductivitySpec::scalar(0.5, 2), s,
                                  FluxSpec::constant_flux(1.0));
  const TransformedTrace wg1 = scheme_matched_transform(fwd1.trace, tau);
  const auto a1 = verify_two_sided_bounds(
      grid, ConductivitySpec::scalar(0.5, 2), s, wg1, tau);
  CHECK(a1.holds);
  CHECK(a1.upper < 0.0);
  CHECK(a1.lower == doctest::Approx(2.0 * a1.upper).epsilon(1e-12));

  // no contrast: everything collapses to zero
  const auto none = verify_two_sided_bounds(
      grid, ConductivitySpec::identity(2), s, wg, tau);
  CHECK(none.lower == 0.0);
  CHECK(none.upper == 0.0);
  CHECK(std::abs(none.middle) <= 1e-10);
}
