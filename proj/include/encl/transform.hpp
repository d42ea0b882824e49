#pragma once

#include <Eigen/Dense>
#include <string>

#include "encl/conductivity.hpp"
#include "encl/forward_heat.hpp"
#include "encl/geometry.hpp"

namespace encl {

/// Per-facet time-Laplace data w(x; tau), g(x; tau) for one tau.
struct TransformedTrace {
  double tau = 0;
  Eigen::VectorXd w;  // transform of the temperature rows
  Eigen::VectorXd g;  // transform of the flux rows
};

/// Trapezoidal quadrature of e^{-tau t} * samples on the trace's own grid.
TransformedTrace laplace_time(const BoundaryTrace& trace, double tau);

/// Scheme-matched transform with weights dt (1 - tau dt)^k, k = 1..N_t.
/// For a backward-Euler sequence u^k this output satisfies the discrete
/// elliptic equation (A + tau V) w = b(g) - tail * V u^N exactly, which is
/// what makes the basic-identity and indicator cancellations clean at the
/// discrete level.  Requires tau * dt < 1.
TransformedTrace scheme_matched_transform(const BoundaryTrace& trace, double tau);

/// The tail weight (1 - tau dt)^{N+1} multiplying u(., T) in the matched
/// discrete identity (discrete counterpart of e^{-tau T}).
double matched_tail_weight(double tau, double dt, int n_time);

/// Matched transform of a scalar time profile: dt sum beta^k phi(t_k).
double matched_scalar_transform(PhiVariant phi, double tau, double dt, int n_time);

/// Exact integral int e^{-tau t} L(t) dt for the piecewise-linear
/// interpolant of (times, values); robust for any tau * dt.
double exp_weighted_pl_integral(const std::vector<double>& times,
                                const Eigen::VectorXd& values, double tau);

struct GuardReport {
  bool ok = true;
  bool spatial_warning = false;   // sqrt(tau) h > 0.5
  bool temporal_warning = false;  // tau dt > 0.5
  double sqrt_tau_h = 0;
  double tau_dt = 0;
  std::string message;
};

GuardReport resolution_guard(double tau, const Grid& grid);

/// Geometric tau sweep tau_j = tau_min * ratio^j, j = 0..count-1.
std::vector<double> geometric_tau_sweep(double tau_min, double ratio, int count);

}  // namespace encl
