#include "encl/indicator.hpp"

#include <algorithm>
#include <cmath>

#include "encl/errors.hpp"
#include "encl/fv.hpp"

namespace encl {

IndicatorSample assemble_indicator(const TransformedTrace& wg,
                                   const ProbeField& probe, const Grid& grid,
                                   const std::string& theorem) {
  if (std::abs(probe.tau() - wg.tau) > 1e-12 * std::max(1.0, wg.tau))
    throw ConfigError("probe and transformed trace disagree on tau");
  const auto& facets = grid.facets();
  const auto m = static_cast<Eigen::Index>(facets.size());
  if (wg.w.size() != m || wg.g.size() != m)
    throw ConfigError("transformed trace does not match the grid facet list");

  LogReal total = LogReal::zero();
  LogReal scale = LogReal::zero();
  const bool solved = probe.variant() == ProbeField::Variant::Solved;
  const Eigen::VectorXd* values =
      solved ? &probe.solved_field()->values : nullptr;
  if (solved && probe.solved_field()->neumann.size() != m)
    throw ConfigError("solved probe is missing its facet Neumann data");
  for (Eigen::Index i = 0; i < m; ++i) {
    const auto& f = facets[static_cast<std::size_t>(i)];
    LogReal t1, t2;
    if (solved) {
      // boundary-cell trace for v and the probe's own Neumann data for
      // dv/dnu: the carrier terms then cancel at the discrete level
      const double v_i = (*values)[f.cell];
      const double dn = probe.solved_field()->neumann[i];
      t1 = LogReal::from_double(wg.g[i] * f.measure * v_i);
      t2 = LogReal::from_double(wg.w[i] * f.measure * dn);
    } else {
      t1 = LogReal::from_double(wg.g[i] * f.measure) * probe.log_value(f.center);
      t2 = LogReal::from_double(wg.w[i] * f.measure) *
           probe.log_normal_derivative(f.center, f.normal);
    }
    total = total + (t1 - t2);
    if (!t1.is_zero()) scale = scale + LogReal(1, t1.log_abs());
    if (!t2.is_zero()) scale = scale + LogReal(1, t2.log_abs());
  }

  IndicatorSample s;
  s.tau = wg.tau;
  s.theorem = theorem;
  s.guard = resolution_guard(wg.tau, grid);
  s.log_summand_scale = scale.log_abs();
  const double floor =
      scale.log_abs() +
      std::log(1e2 * std::numeric_limits<double>::epsilon());
  if (total.is_zero() || total.log_abs() < floor) {
    s.sign = 0;
    return s;
  }
  s.sign = total.sign();
  s.log_abs = total.log_abs();
  s.log_abs_corrected = s.log_abs;
  return s;
}

ExtractionResult extract_limit(const std::vector<IndicatorSample>& samples,
                               int last_k) {
  std::vector<const IndicatorSample*> usable;
  for (const auto& s : samples)
    if (s.sign != 0) usable.push_back(&s);
  for (std::size_t i = 1; i < usable.size(); ++i)
    if (!(usable[i]->tau > usable[i - 1]->tau))
      throw ConfigError("extraction requires increasing tau");
  if (usable.size() < 4)
    throw InsufficientDataError(
        "extraction needs at least 4 sign-determinate samples");

  // longest constant-sign suffix
  std::size_t start = usable.size() - 1;
  while (start > 0 && usable[start - 1]->sign == usable.back()->sign) --start;
  const std::size_t count = usable.size() - start;
  if (count < 4)
    throw SignInconsistencyError(
        "indicator sign flips within the sweep leave fewer than 4 usable "
        "samples");

  ExtractionResult out;
  out.theorem = usable.back()->theorem;
  out.indicator_sign = usable.back()->sign;
  out.sign_consistent = (start == 0);
  for (std::size_t i = start; i < usable.size(); ++i) {
    out.taus.push_back(usable[i]->tau);
    out.log_abs.push_back(usable[i]->log_abs_corrected);
  }

  const int n = static_cast<int>(out.taus.size());
  for (int i = 0; i + 1 < n; ++i) {
    const double ds = std::sqrt(out.taus[i + 1]) - std::sqrt(out.taus[i]);
    out.slopes.push_back((out.log_abs[i + 1] - out.log_abs[i]) / (2.0 * ds));
  }
  const int k = std::min<int>(last_k, static_cast<int>(out.slopes.size()));
  double mean = 0;
  for (int i = 0; i < k; ++i) mean += out.slopes[out.slopes.size() - 1 - i];
  out.pairwise_estimate = mean / k;

  // least-squares fit log|I| = a 2 sqrt(tau) + b log tau + c over the upper
  // half of the sweep: the small-tau transient is not described by this
  // model and would bias the slope
  const int window = std::max(4, n / 2);
  const int first = n - window;
  Eigen::MatrixXd design(window, 3);
  Eigen::VectorXd rhs(window);
  for (int i = 0; i < window; ++i) {
    design(i, 0) = 2.0 * std::sqrt(out.taus[first + i]);
    design(i, 1) = std::log(out.taus[first + i]);
    design(i, 2) = 1.0;
    rhs[i] = out.log_abs[first + i];
  }
  const Eigen::Vector3d coef = design.colPivHouseholderQr().solve(rhs);
  out.estimate = coef[0];
  out.fit_b = coef[1];
  out.fit_c = coef[2];
  out.fit_residual = std::sqrt((design * coef - rhs).squaredNorm() / window);

  const double denom =
      std::max({std::abs(out.estimate), std::abs(out.pairwise_estimate), 1e-6});
  out.estimator_disagreement =
      std::abs(out.estimate - out.pairwise_estimate) > 0.1 * denom;
  return out;
}

IdentityReport verify_basic_identity(const Grid& grid,
                                     const ConductivitySpec& cond,
                                     const InclusionScene& scene,
                                     const TransformedTrace& wg,
                                     const Eigen::VectorXd& w_vol,
                                     const Eigen::VectorXd& u_final,
                                     double tau) {
  const int n_cells = grid.num_cells();
  const double vol = grid.cell_volume();

  FvOperator op_id(grid, ConductivitySpec::identity(grid.dim()), scene);
  FvOperator op_g(grid, cond, scene);

  const Eigen::VectorXd b = op_id.boundary_load(wg.g);

  auto solve_with = [&](const FvOperator& op) {
    Eigen::SparseMatrix<double> system = op.stiffness();
    for (int c = 0; c < n_cells; ++c) system.coeffRef(c, c) += tau * vol;
    system.makeCompressed();
    LinearSolver solver(system, 20 * n_cells);
    return solver.solve(b);
  };
  const Eigen::VectorXd v = solve_with(op_id);
  const Eigen::VectorXd p = solve_with(op_g);

  const Eigen::VectorXd eps = w_vol - p;
  const double tail =
      matched_tail_weight(tau, grid.dt(), grid.n_time());

  IdentityReport rep;
  rep.lhs = b.dot(v - w_vol);
  rep.nd_term = b.dot(v - p);
  rep.volume_term = op_g.energy_form(v, eps) - op_id.energy_form(v, eps);
  rep.tail_term = tail * vol * v.dot(u_final);
  rep.rhs = rep.nd_term + rep.volume_term + rep.tail_term;
  const double scale = std::max({std::abs(rep.lhs), std::abs(rep.rhs), 1e-300});
  rep.relative_mismatch = std::abs(rep.lhs - rep.rhs) / scale;
  rep.remainder_fraction =
      std::abs(rep.volume_term + rep.tail_term) /
      std::max(std::abs(rep.lhs), 1e-300);
  return rep;
}

BoundsReport verify_two_sided_bounds(const Grid& grid,
                                     const ConductivitySpec& cond,
                                     const InclusionScene& scene,
                                     const TransformedTrace& g, double tau) {
  const ProbeField v_probe = solve_neumann_probe(grid, g, tau);
  const SolvedField& v = *v_probe.solved_field();
  const auto p = solve_gamma_helmholtz(grid, cond, scene, g, tau);

  const int d = grid.dim();
  const Eigen::MatrixXd gamma = cond.inclusion_tensor;
  const Eigen::MatrixXd lower_t =
      Eigen::MatrixXd::Identity(d, d) - gamma.inverse();
  const Eigen::MatrixXd upper_t = gamma - Eigen::MatrixXd::Identity(d, d);

  BoundsReport rep;
  const double vol = grid.cell_volume();
  for (int c = 0; c < grid.num_cells(); ++c) {
    const double frac = cell_fraction_in(scene.inclusion, grid.cell_center(c),
                                         grid.h(), d);
    if (frac == 0.0) continue;
    const Point grad3 = v.gradient(grid.cell_center(c));
    Eigen::VectorXd gr(d);
    for (int a = 0; a < d; ++a) gr[a] = grad3[a];
    rep.lower += frac * vol * gr.dot(lower_t * gr);
    rep.upper += frac * vol * gr.dot(upper_t * gr);
  }

  // middle term int g (v - p) over the facets (boundary-cell traces)
  const auto& facets = grid.facets();
  for (std::size_t i = 0; i < facets.size(); ++i) {
    const auto& f = facets[i];
    rep.middle += f.measure * g.g[static_cast<Eigen::Index>(i)] *
                  (v.values[f.cell] - p->values[f.cell]);
  }

  rep.slack = 0.05 * std::max(std::abs(rep.lower), std::abs(rep.upper));
  rep.holds = (rep.lower <= rep.middle + rep.slack) &&
              (rep.middle <= rep.upper + rep.slack);
  return rep;
}

}  // namespace encl
