#include <doctest.h>

#include <cmath>

#include "encl/forward_heat.hpp"
#include "encl/transform.hpp"

using namespace encl;

namespace {

InclusionScene box_scene() {
  InclusionScene s;
  s.domain = Domain::box(Point(-1, -1, 0), Point(1, 1, 0), 2);
  s.inclusion = Inclusion::ball(Point(0.2, 0.0, 0.0), 0.3);
  return s;
}

InclusionScene disk_scene() {
  InclusionScene s;
  s.domain = Domain::ball(Point::Zero(), 1.0, 2);
  s.inclusion = Inclusion::ball(Point(0.2, 0.0, 0.0), 0.3);
  return s;
}

}  // namespace

TEST_CASE("zero flux gives an identically zero solution") {
  const InclusionScene s = disk_scene();
  const Grid grid = build_grid(s.domain, 32, 1.0, 32);
  FluxSpec zero;  // the factory rejects a = 0; build the value directly
  zero.variant = FluxSpec::Variant::Constant;
  zero.constant = 0.0;
  const auto r = solve_forward(grid, ConductivitySpec::scalar(2.0, 2), s, zero);
  CHECK(r.trace.u.cwiseAbs().maxCoeff() == 0.0);
  CHECK(r.state.final_field.cwiseAbs().maxCoeff() == 0.0);
  for (double e : energy_history(r.state)) CHECK(e == 0.0);
}

TEST_CASE("discrete conservation on the box benchmark") {
  const InclusionScene s = box_scene();
  const Grid grid = build_grid(s.domain, 32, 1.0, 48);
  const auto r = solve_forward(grid, ConductivitySpec::identity(2), s,
                               FluxSpec::constant_flux(1.0));
  // d/dt int u = int_dOmega f telescopes exactly for the scheme
  const double boundary = grid.facet_measure_sum();
  CHECK(r.state.mass.back() ==
        doctest::Approx(boundary * grid.T()).epsilon(1e-8));
  // every level, not just the last
  for (int k = 1; k <= grid.n_time(); ++k)
    CHECK(r.state.mass[static_cast<std::size_t>(k)] ==
          doctest::Approx(boundary * k * grid.dt()).epsilon(1e-8));
}

TEST_CASE("conservation holds with a contrasting inclusion") {
  const InclusionScene s = disk_scene();
  const Grid grid = build_grid(s.domain, 48, 1.0, 48);
  const auto r = solve_forward(grid, ConductivitySpec::scalar(2.0, 2), s,
                               FluxSpec::constant_flux(1.0));
  CHECK(r.state.mass.back() ==
        doctest::Approx(grid.facet_measure_sum() * grid.T()).epsilon(1e-8));
}

TEST_CASE("comparison principle smoke test") {
  const InclusionScene s = disk_scene();
  const Grid grid = build_grid(s.domain, 32, 1.0, 32);
  const auto r = solve_forward(grid, ConductivitySpec::scalar(0.5, 2), s,
                               FluxSpec::constant_flux(1.0));
  CHECK(r.state.final_field.minCoeff() >= -1e-8);
  CHECK(r.trace.u.minCoeff() >= -1e-8);
}

TEST_CASE("energy history is finite and grows from zero") {
  const InclusionScene s = disk_scene();
  const Grid grid = build_grid(s.domain, 32, 1.0, 32);
  const auto r = solve_forward(grid, ConductivitySpec::scalar(2.0, 2), s,
                               FluxSpec::constant_flux(1.0));
  const auto e = energy_history(r.state);
  REQUIRE(e.size() == static_cast<std::size_t>(grid.n_time() + 1));
  CHECK(e.front() == 0.0);
  for (std::size_t k = 1; k < e.size(); ++k) {
    CHECK(std::isfinite(e[k]));
    CHECK(e[k] >= e[k - 1] - 1e-14);
  }
}

TEST_CASE("boundary trace is self-consistent under refinement") {
  const InclusionScene s = disk_scene();
  auto probe_value = [&](int n) {
    const Grid grid = build_grid(s.domain, n, 1.0, n);
    const auto r = solve_forward(grid, ConductivitySpec::scalar(2.0, 2), s,
                                 FluxSpec::constant_flux(1.0));
    // facet nearest (1, 0), final time
    int best = 0;
    double best_d = 1e30;
    for (std::size_t i = 0; i < r.trace.facets.size(); ++i) {
      const double d = (r.trace.facets[i].center - Point(1, 0, 0)).norm();
      if (d < best_d) {
        best_d = d;
        best = static_cast<int>(i);
      }
    }
    return r.trace.u(best, r.trace.u.cols() - 1);
  };
  const double coarse = probe_value(64);
  const double fine = probe_value(128);
  CHECK(fine == doctest::Approx(coarse).epsilon(0.05));
}

TEST_CASE("trace shape contract") {
  const InclusionScene s = disk_scene();
  const Grid grid = build_grid(s.domain, 32, 1.0, 40);
  const auto r = solve_forward(grid, ConductivitySpec::scalar(2.0, 2), s,
                               FluxSpec::constant_flux(1.0));
  CHECK(r.trace.u.rows() == static_cast<Eigen::Index>(grid.facets().size()));
  CHECK(r.trace.u.cols() == grid.n_time() + 1);
  CHECK(r.trace.u.col(0).cwiseAbs().maxCoeff() == 0.0);
  CHECK(r.trace.f.col(1).minCoeff() == 1.0);
}

TEST_CASE("matched volume transform satisfies the discrete equation") {
  // (A + tau V) w_hat = b(g_hat) - (1 - tau dt)^{N+1} V u^N, by construction
  const InclusionScene s = disk_scene();
  const Grid grid = build_grid(s.domain, 32, 1.0, 64);
  const ConductivitySpec cond = ConductivitySpec::scalar(2.0, 2);
  const double tau = 15.0;
  ForwardOptions opt;
  opt.store_history = false;
  opt.transform_taus = {tau};
  const auto r = solve_forward(grid, cond, s, FluxSpec::constant_flux(1.0),
                               std::nullopt, nullptr, opt);
  const TransformedTrace wg = scheme_matched_transform(r.trace, tau);

  FvOperator op(grid, cond, s);
  Eigen::VectorXd lhs = op.stiffness() * r.volume_transforms[0] +
                        tau * grid.cell_volume() * r.volume_transforms[0];
  Eigen::VectorXd rhs = op.boundary_load(wg.g) -
                        matched_tail_weight(tau, grid.dt(), grid.n_time()) *
                            grid.cell_volume() * r.state.final_field;
  CHECK((lhs - rhs).cwiseAbs().maxCoeff() <=
        1e-10 * std::max(1.0, rhs.cwiseAbs().maxCoeff()));
}
