#include "encl/forward_heat.hpp"

#include <cmath>

#include "encl/probe_fields.hpp"

namespace encl {

ForwardResult solve_forward(const Grid& grid, const ConductivitySpec& cond,
                            const InclusionScene& scene, const FluxSpec& flux,
                            std::optional<double> tau, const ProbeField* probe,
                            const ForwardOptions& options) {
  const bool needs_tau = flux.variant == FluxSpec::Variant::ProbeFlux;
  if (needs_tau && (!tau || probe == nullptr))
    throw ConfigError("probe flux requires tau and a probe field");
  if (!needs_tau && probe != nullptr)
    throw ConfigError("probe supplied for a flux that does not use one");

  const int n_cells = grid.num_cells();
  const int n_time = grid.n_time();
  const double dt = grid.dt();
  const double vol = grid.cell_volume();
  const auto& facets = grid.facets();
  const auto n_facets = static_cast<Eigen::Index>(facets.size());

  FvOperator op(grid, cond, scene);
  Eigen::SparseMatrix<double> system = op.stiffness();
  const double vol_over_dt = vol / dt;
  for (int c = 0; c < n_cells; ++c) system.coeffRef(c, c) += vol_over_dt;
  system.makeCompressed();
  LinearSolver solver(system, 20 * grid.n());

  ForwardResult out;
  out.trace.times.resize(n_time + 1);
  for (int k = 0; k <= n_time; ++k) out.trace.times[k] = k * dt;
  out.trace.facets = facets;
  out.trace.T = grid.T();
  out.trace.dt = dt;
  out.trace.u = Eigen::MatrixXd::Zero(n_facets, n_time + 1);
  out.trace.f = Eigen::MatrixXd::Zero(n_facets, n_time + 1);
  for (int k = 0; k <= n_time; ++k) {
    const double t = out.trace.times[k];
    for (Eigen::Index i = 0; i < n_facets; ++i)
      out.trace.f(i, k) = flux_value(flux, facets[i].center, facets[i].normal,
                                     t, tau.value_or(0.0), probe);
  }

  // matched transform weights: dt * (1 - tau*dt)^k, exactly consistent with
  // the backward-Euler recurrence (see transform module)
  std::vector<double> beta;
  for (double t : options.transform_taus) {
    if (t * dt >= 1.0)
      throw ConfigError("transform tau too large for the time grid (tau*dt >= 1)");
    beta.push_back(1.0 - t * dt);
    out.volume_transforms.emplace_back(Eigen::VectorXd::Zero(n_cells));
  }

  out.state.dt = dt;
  out.state.cell_volume = vol;
  out.state.energy.assign(n_time + 1, 0.0);
  out.state.mass.assign(n_time + 1, 0.0);
  Eigen::VectorXd u = Eigen::VectorXd::Zero(n_cells);
  if (options.store_history) out.state.history.push_back(u);

  std::vector<double> beta_pow(beta.size(), 1.0);
  for (int k = 1; k <= n_time; ++k) {
    Eigen::VectorXd rhs = vol_over_dt * u + op.boundary_load(out.trace.f.col(k));
    if (op.has_offdiagonal()) rhs += op.offdiagonal_load(u);
    u = solver.solve_with_guess(rhs, u);

    for (Eigen::Index i = 0; i < n_facets; ++i)
      out.trace.u(i, k) = u[facets[i].cell];
    out.state.energy[k] = vol * u.squaredNorm();
    out.state.mass[k] = vol * u.sum();
    for (std::size_t j = 0; j < beta.size(); ++j) {
      beta_pow[j] *= beta[j];
      out.volume_transforms[j] += dt * beta_pow[j] * u;
    }
    if (options.store_history) out.state.history.push_back(u);
  }
  out.state.final_field = u;
  return out;
}

std::vector<double> energy_history(const HeatState& state) {
  return state.energy;
}

}  // namespace encl
