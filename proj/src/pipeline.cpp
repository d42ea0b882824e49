#include "encl/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <functional>
#include <thread>

#include "encl/errors.hpp"
#include "encl/transform.hpp"

namespace encl {

namespace {

/// Runs fn(0..n-1) on up to `workers` threads; rethrows the first failure.
void parallel_for(int n, int workers, const std::function<void(int)>& fn) {
  const int threads = std::max(1, std::min(workers, n));
  if (threads == 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(n));
  std::vector<std::thread> pool;
  for (int t = 0; t < threads; ++t)
    pool.emplace_back([&] {
      for (int i = next.fetch_add(1); i < n; i = next.fetch_add(1)) {
        try {
          fn(i);
        } catch (...) {
          errors[static_cast<std::size_t>(i)] = std::current_exception();
        }
      }
    });
  for (auto& th : pool) th.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

std::optional<PhiVariant> time_profile_of(const FluxSpec& flux) {
  switch (flux.variant) {
    case FluxSpec::Variant::Constant:
      return PhiVariant::One;
    case FluxSpec::Variant::TimePower:
      if (flux.power == 0) return PhiVariant::One;
      if (flux.power == 1) return PhiVariant::Ramp;
      return std::nullopt;
    case FluxSpec::Variant::ProbeFlux:
      return flux.phi;
  }
  return std::nullopt;
}

ProbeField make_explicit_probe(const RunConfig& cfg, const Point& param,
                               double tau) {
  if (cfg.theorem == "T1.2")
    return ProbeField::plane(param, tau, cfg.dimension);
  if (cfg.theorem == "T1.3")
    return ProbeField::point_source(param, tau, cfg.dimension,
                                    &cfg.scene.domain);
  return ProbeField::growing(param, tau, cfg.dimension);
}

double truth_of(const RunConfig& cfg, const Point& param) {
  if (cfg.theorem == "T1.1") return depth(cfg.scene);
  if (cfg.theorem == "T1.2") return support_function(cfg.scene, param);
  if (cfg.theorem == "T1.3") return point_distance(cfg.scene, param);
  return enclosing_radius(cfg.scene, param);
}

double convert_estimate(const std::string& theorem, double slope) {
  // T1.1: slope -> -depth, T1.2: slope -> h_D, T1.3: slope -> -d_D,
  // T1.4: slope -> R_D
  if (theorem == "T1.1" || theorem == "T1.3") return -slope;
  return slope;
}

bool all_indeterminate(const std::vector<IndicatorSample>& samples) {
  for (const auto& s : samples)
    if (s.sign != 0) return false;
  return !samples.empty();
}

}  // namespace

double transform_correction(const FluxSpec& flux, double tau, double T,
                            double dt, int n_time) {
  const auto phi = time_profile_of(flux);
  if (!phi) return 0.0;
  const double exact = phi_transform_exact(*phi, tau, T);
  const double disc = matched_scalar_transform(*phi, tau, dt, n_time);
  if (exact <= 0 || disc <= 0) return 0.0;
  return std::log(exact) - std::log(disc);
}

ForwardResult run_forward(const RunConfig& cfg, const Grid& grid,
                          const std::vector<double>& transform_taus,
                          std::optional<double> probe_tau,
                          const ProbeField* probe) {
  ForwardOptions options;
  options.store_history = false;
  options.transform_taus = transform_taus;
  return solve_forward(grid, cfg.conductivity, cfg.scene, cfg.flux, probe_tau,
                       probe, options);
}

RunSummary run_reconstruction(const RunConfig& cfg) {
  RunSummary summary;
  summary.config_hash = cfg.hash;
  summary.theorem = cfg.theorem;
  summary.dimension = cfg.dimension;

  const Grid grid = build_grid(cfg.scene.domain, cfg.n, cfg.T, cfg.n_time);
  const std::vector<double> taus = cfg.tau_sweep();
  for (double tau : taus)
    if (!resolution_guard(tau, grid).ok) summary.degraded = true;

  if (cfg.theorem == "T1.1") {
    ReconstructionEntry entry;
    entry.theorem = cfg.theorem;
    entry.truth = truth_of(cfg, Point::Zero());
    try {
      const ForwardResult fwd = run_forward(cfg, grid, {});
      entry.samples.resize(taus.size());
      parallel_for(static_cast<int>(taus.size()), cfg.workers, [&](int j) {
        const double tau = taus[static_cast<std::size_t>(j)];
        const TransformedTrace wg = scheme_matched_transform(fwd.trace, tau);
        const ProbeField probe = solve_neumann_probe(grid, wg, tau);
        IndicatorSample s = assemble_indicator(wg, probe, grid, cfg.theorem);
        // the solved probe is linear in the data, so the time-profile
        // distortion enters twice
        s.log_abs_corrected =
            s.log_abs +
            2.0 * transform_correction(cfg.flux, tau, cfg.T, grid.dt(),
                                       grid.n_time());
        entry.samples[static_cast<std::size_t>(j)] = s;
      });
      // a contrast signal survives to the top of the sweep; the gamma = I
      // residual dies with the discrete e^{-tau T} tail instead
      int determinate = 0;
      for (const auto& s : entry.samples)
        if (s.sign != 0) ++determinate;
      const bool tail_dead =
          !entry.samples.empty() && entry.samples.back().sign == 0;
      if (determinate == 0 || (tail_dead && determinate < 4)) {
        summary.note = "no inclusion detected at this sensitivity";
      } else {
        const ExtractionResult ex = extract_limit(entry.samples);
        entry.extraction = ex;
        entry.reported = convert_estimate(cfg.theorem, ex.estimate);
      }
    } catch (const std::exception& e) {
      entry.error = std::string("reconstruction: ") + e.what();
    }
    summary.entries.push_back(std::move(entry));
    return summary;
  }

  // T1.2-T1.4: the flux depends on tau through the probe, so the forward
  // solve runs per tau
  const std::vector<Point>& params = cfg.theorem == "T1.2" ? cfg.directions
                                     : cfg.theorem == "T1.3" ? cfg.points
                                                             : cfg.centers;
  FluxSpec flux = cfg.flux;
  if (flux.variant != FluxSpec::Variant::ProbeFlux)
    flux = FluxSpec::probe_flux(PhiVariant::One);

  for (const Point& param : params) {
    ReconstructionEntry entry;
    entry.theorem = cfg.theorem;
    entry.param = param;
    entry.truth = truth_of(cfg, param);
    try {
      entry.samples.resize(taus.size());
      parallel_for(static_cast<int>(taus.size()), cfg.workers, [&](int j) {
        const double tau = taus[static_cast<std::size_t>(j)];
        const ProbeField probe = make_explicit_probe(cfg, param, tau);
        ForwardOptions options;
        options.store_history = false;
        const ForwardResult fwd = solve_forward(
            grid, cfg.conductivity, cfg.scene, flux, tau, &probe, options);
        const TransformedTrace wg = scheme_matched_transform(fwd.trace, tau);
        // discretize the explicit probe: solve the discrete Neumann problem
        // with the probe's own boundary flux, so the carrier terms of the
        // indicator cancel at the discrete level instead of leaking an
        // O(h^2) multiple of the boundary-scale exponential
        const auto& facets = grid.facets();
        TransformedTrace pd;
        pd.tau = tau;
        pd.w = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(facets.size()));
        pd.g = Eigen::VectorXd(static_cast<Eigen::Index>(facets.size()));
        for (std::size_t i = 0; i < facets.size(); ++i)
          pd.g[static_cast<Eigen::Index>(i)] =
              probe.gradient(facets[i].center).dot(facets[i].normal);
        const ProbeField probe_h = solve_neumann_probe(grid, pd, tau);
        IndicatorSample s = assemble_indicator(wg, probe_h, grid, cfg.theorem);
        s.log_abs_corrected =
            s.log_abs +
            transform_correction(flux, tau, cfg.T, grid.dt(), grid.n_time());
        entry.samples[static_cast<std::size_t>(j)] = s;
      });
      if (all_indeterminate(entry.samples)) {
        entry.error = "reconstruction: all samples sign-indeterminate";
      } else {
        const ExtractionResult ex = extract_limit(entry.samples);
        entry.extraction = ex;
        entry.reported = convert_estimate(cfg.theorem, ex.estimate);
      }
    } catch (const std::exception& e) {
      entry.error = std::string("reconstruction: ") + e.what();
    }
    summary.entries.push_back(std::move(entry));
  }
  return summary;
}

RunSummary run_validation(const RunConfig& cfg) {
  RunSummary summary;
  summary.config_hash = cfg.hash;
  summary.theorem = cfg.theorem;
  summary.dimension = cfg.dimension;

  const Grid grid = build_grid(cfg.scene.domain, cfg.n, cfg.T, cfg.n_time);
  const std::vector<double> taus = cfg.tau_sweep();
  for (double tau : taus)
    if (!resolution_guard(tau, grid).ok) summary.degraded = true;

  FluxSpec flux = cfg.flux;
  if (flux.variant == FluxSpec::Variant::ProbeFlux)
    flux = FluxSpec::constant_flux(1.0);

  ValidationReport rep;
  const auto admissibility =
      verify_flux_admissibility(flux, taus, cfg.T, {}, {});
  rep.flux_admissible = admissibility.admissible;

  double tau_id = 25.0;
  if (tau_id * grid.dt() >= 1.0 || tau_id < taus.front()) tau_id = taus.front();
  rep.identity_tau = tau_id;

  RunConfig fwd_cfg = cfg;
  fwd_cfg.flux = flux;
  const ForwardResult fwd = run_forward(fwd_cfg, grid, {tau_id});
  const TransformedTrace wg_id = scheme_matched_transform(fwd.trace, tau_id);
  rep.identity = verify_basic_identity(grid, cfg.conductivity, cfg.scene,
                                       wg_id, fwd.volume_transforms[0],
                                       fwd.state.final_field, tau_id);

  const int n_tau = static_cast<int>(taus.size());
  rep.bounds.resize(taus.size());
  rep.bounds_taus = taus;
  parallel_for(n_tau, cfg.workers, [&](int j) {
    const double tau = taus[static_cast<std::size_t>(j)];
    const TransformedTrace wg = scheme_matched_transform(fwd.trace, tau);
    rep.bounds[static_cast<std::size_t>(j)] =
        verify_two_sided_bounds(grid, cfg.conductivity, cfg.scene, wg, tau);
  });

  // Scaled-energy asymptotics on designated tau grids.  The probe data uses
  // the closed-form transform of the flux where available, so the grids are
  // not limited by the tau*dt < 1 constraint of the scheme-matched
  // transform.  The rate fit needs a wide sqrt(tau) span; the boundedness
  // verdicts compare against the median, so they use a narrow high-tau
  // window where the residual polynomial trend of the (deliberately
  // non-sharp) lambda exponents stays inside the fixed factors.
  const auto profile = time_profile_of(flux);
  const double flux_scale =
      flux.variant == FluxSpec::Variant::Constant ? flux.constant : 1.0;
  const double tau_cap = 0.9 / grid.dt();
  auto energy_trace = [&](double tau) {
    TransformedTrace g;
    if (profile) {
      g.tau = tau;
      const auto m = static_cast<Eigen::Index>(grid.facets().size());
      g.g = Eigen::VectorXd::Constant(
          m, flux_scale * phi_transform_exact(*profile, tau, cfg.T));
      g.w = Eigen::VectorXd::Zero(m);
    } else {
      g = scheme_matched_transform(fwd.trace, std::min(tau, tau_cap));
    }
    return g;
  };
  auto energy_grid = [&](double lo, double hi, int count) {
    std::vector<double> grid_taus(static_cast<std::size_t>(count));
    for (int j = 0; j < count; ++j)
      grid_taus[static_cast<std::size_t>(j)] =
          profile ? lo * std::pow(hi / lo, j / (count - 1.0))
                  : std::min(lo * std::pow(hi / lo, j / (count - 1.0)),
                             tau_cap * std::pow(0.98, count - 1 - j));
    return grid_taus;
  };
  const double tau_hi = std::min(400.0, std::pow(0.5 / grid.h(), 2));
  const std::vector<double> rate_taus =
      energy_grid(std::min(50.0, 0.25 * tau_hi), tau_hi, 9);
  const std::vector<double> band_taus = energy_grid(0.5 * tau_hi, tau_hi, 8);
  std::vector<double> log_energy(rate_taus.size());
  std::vector<double> lambda1_seq(band_taus.size()),
      lambda2_seq(band_taus.size());
  const double d0 = depth(cfg.scene);
  parallel_for(static_cast<int>(rate_taus.size() + band_taus.size()),
               cfg.workers, [&](int j) {
    const bool band = j >= static_cast<int>(rate_taus.size());
    const std::size_t k =
        band ? static_cast<std::size_t>(j) - rate_taus.size()
             : static_cast<std::size_t>(j);
    const double tau = band ? band_taus[k] : rate_taus[k];
    const ProbeField v = solve_neumann_probe(grid, energy_trace(tau), tau);
    const ScaledEnergy e = scaled_gradient_energy(cfg.scene, grid, v, tau, flux.mu);
    if (band) {
      lambda1_seq[k] = e.lambda1_scaled;
      lambda2_seq[k] = e.lambda2_scaled;
    } else {
      log_energy[k] = e.energy > 0
                          ? std::log(e.energy)
                          : -std::numeric_limits<double>::infinity();
    }
  });

  rep.energy_checks.push_back(
      bounded_above_check("energy-lambda1", band_taus, lambda1_seq));
  rep.energy_checks.push_back(
      bounded_below_check("energy-lambda2", band_taus, lambda2_seq));
  rep.energy_checks.push_back(slope_match_check(
      "energy-rate", rate_taus, log_energy, -2.0 * d0, 0.10));

  bool pass = rep.flux_admissible;
  pass = pass && rep.identity->relative_mismatch <= 1e-6 &&
         rep.identity->remainder_fraction <= 0.01;
  for (const auto& b : rep.bounds) pass = pass && b.holds;
  for (const auto& c : rep.energy_checks) pass = pass && c.pass;
  rep.all_pass = pass;
  summary.validation = std::move(rep);
  return summary;
}

std::vector<AsymptoticCheck> run_oracles(const RunConfig& cfg) {
  const InclusionScene& scene = cfg.scene;
  const Domain& dom = scene.domain;
  const int dim = cfg.dimension;
  std::vector<AsymptoticCheck> checks;

  const std::vector<double> slope_taus = {25, 50, 100, 200, 400};

  // decay slopes: plane / source / growing exponential integrals over D
  Point omega = Point::Zero();
  omega[0] = 1.0;
  if (!cfg.directions.empty()) omega = cfg.directions.front();
  Point source = dom.center;
  source[0] += 2.0 * dom.radius;
  if (!cfg.points.empty()) source = cfg.points.front();
  Point center = dom.center;
  if (!cfg.centers.empty()) center = cfg.centers.front();

  struct Case {
    const char* name;
    OracleVariant variant;
    Point param;
    double target;
  };
  const Case cases[] = {
      {"decay-plane", OracleVariant::Plane, omega,
       2.0 * support_function(scene, omega)},
      {"decay-source", OracleVariant::Source, source,
       -2.0 * point_distance(scene, source)},
      {"decay-growing", OracleVariant::Growing, center,
       2.0 * enclosing_radius(scene, center)},
  };
  for (const auto& c : cases) {
    std::vector<double> logs;
    for (double tau : slope_taus)
      logs.push_back(exp_integral_over_D(scene, c.variant, c.param, tau));
    checks.push_back(
        slope_match_check(c.name, slope_taus, logs, c.target, 0.05));
  }

  // local volume integral on the half-space model: the scaled value tends to a
  // curvature-free constant, so the band verdict lives on a ball large
  // enough that the decay length 1/(2 sqrt tau) never sees the curvature.
  const std::vector<double> claim_taus = {100, 400, 1600};
  {
    InclusionScene model;
    model.domain = Domain::ball(Point::Zero(), 300.0, dim);
    model.inclusion = Inclusion::ball(Point::Zero(), 100.0);
    Point x0 = Point::Zero();
    x0[0] = 100.0;

    AsymptoticCheck c;
    c.name = "volume-local";
    c.taus = claim_taus;
    const double delta = 0.5;
    for (double tau : claim_taus)
      c.scaled_values.push_back(volume_local_integral(x0, delta, tau, model));
    c.verdict = Verdict::BoundedBelowPositive;
    const double mn =
        *std::min_element(c.scaled_values.begin(), c.scaled_values.end());
    const double mx =
        *std::max_element(c.scaled_values.begin(), c.scaled_values.end());
    c.pass = mn > 0 && mn >= 0.8 * mx;  // positive and inside a 20% band
    if (!c.pass) c.verdict = Verdict::Fail;
    checks.push_back(std::move(c));
  }

  // local surface integral at a boundary point of Omega (ball domains only)
  if (dom.shape == DomainShape::Ball) {
    AsymptoticCheck c;
    c.name = "surface-local";
    c.taus = claim_taus;
    Point y0 = dom.center;
    y0[0] += dom.radius;
    const double delta = 0.5 * dom.radius;
    for (double tau : claim_taus)
      c.scaled_values.push_back(surface_local_integral(y0, delta, tau, dom));
    const double flat_limit = dim == 2 ? 2.0 : 2.0 * M_PI;
    const double last = c.scaled_values.back();
    const double mn =
        *std::min_element(c.scaled_values.begin(), c.scaled_values.end());
    const double mx =
        *std::max_element(c.scaled_values.begin(), c.scaled_values.end());
    c.verdict = Verdict::BoundedBelowPositive;
    c.target = flat_limit;
    c.fitted = last;
    c.pass = mn > 0 && mn >= 0.8 * mx &&
             std::abs(last - flat_limit) <= 0.05 * flat_limit;
    if (!c.pass) c.verdict = Verdict::Fail;
    checks.push_back(std::move(c));
  }
  return checks;
}

}  // namespace encl
