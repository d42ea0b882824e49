#include "encl/transform.hpp"

#include <cmath>
#include <sstream>

#include "encl/errors.hpp"

namespace encl {

TransformedTrace laplace_time(const BoundaryTrace& trace, double tau) {
  if (tau <= 0) throw ConfigError("laplace_time requires tau > 0");
  const int n = static_cast<int>(trace.times.size());
  Eigen::VectorXd weights(n);
  for (int k = 0; k < n; ++k) {
    weights[k] = trace.dt * std::exp(-tau * trace.times[k]);
    if (k == 0 || k == n - 1) weights[k] *= 0.5;
  }
  TransformedTrace out;
  out.tau = tau;
  out.w = trace.u * weights;
  out.g = trace.f * weights;
  return out;
}

TransformedTrace scheme_matched_transform(const BoundaryTrace& trace, double tau) {
  if (tau <= 0) throw ConfigError("transform requires tau > 0");
  const double beta = 1.0 - tau * trace.dt;
  if (beta <= 0)
    throw ConfigError("matched transform requires tau * dt < 1");
  const int n = static_cast<int>(trace.times.size());
  Eigen::VectorXd weights = Eigen::VectorXd::Zero(n);
  double bp = 1.0;
  for (int k = 1; k < n; ++k) {
    bp *= beta;
    weights[k] = trace.dt * bp;
  }
  TransformedTrace out;
  out.tau = tau;
  out.w = trace.u * weights;
  out.g = trace.f * weights;
  return out;
}

double matched_tail_weight(double tau, double dt, int n_time) {
  const double beta = 1.0 - tau * dt;
  if (beta <= 0) throw ConfigError("matched transform requires tau * dt < 1");
  return std::pow(beta, n_time + 1);
}

double matched_scalar_transform(PhiVariant phi, double tau, double dt,
                                int n_time) {
  const double beta = 1.0 - tau * dt;
  if (beta <= 0) throw ConfigError("matched transform requires tau * dt < 1");
  double sum = 0, bp = 1.0;
  for (int k = 1; k <= n_time; ++k) {
    bp *= beta;
    sum += bp * phi_value(phi, k * dt);
  }
  return dt * sum;
}

double exp_weighted_pl_integral(const std::vector<double>& times,
                                const Eigen::VectorXd& values, double tau) {
  // segment-exact: int_a^b e^{-tau t} (linear) dt
  double total = 0;
  for (std::size_t k = 0; k + 1 < times.size(); ++k) {
    const double a = times[k], b = times[k + 1], dt = b - a;
    const double va = values[static_cast<Eigen::Index>(k)];
    const double vb = values[static_cast<Eigen::Index>(k + 1)];
    const double x = tau * dt;
    const double ea = std::exp(-tau * a);
    // int_0^dt e^{-tau s}(va + (vb-va) s/dt) ds
    double m0, m1;  // moments of e^{-tau s} and s/dt e^{-tau s}
    if (x < 1e-6) {
      m0 = dt * (1 - x / 2 + x * x / 6);
      m1 = dt * (0.5 - x / 3 + x * x / 8);
    } else {
      const double ex = std::exp(-x);
      m0 = (1 - ex) / tau;
      m1 = (m0 - dt * ex) / x;
    }
    total += ea * (va * m0 + (vb - va) * m1);
  }
  return total;
}

GuardReport resolution_guard(double tau, const Grid& grid) {
  GuardReport rep;
  rep.sqrt_tau_h = std::sqrt(tau) * grid.h();
  rep.tau_dt = tau * grid.dt();
  rep.spatial_warning = rep.sqrt_tau_h > 0.5;
  rep.temporal_warning = rep.tau_dt > 0.5;
  rep.ok = !rep.spatial_warning && !rep.temporal_warning;
  if (!rep.ok) {
    std::ostringstream os;
    if (rep.spatial_warning)
      os << "boundary layer under-resolved: sqrt(tau)*h = " << rep.sqrt_tau_h
         << " > 0.5";
    if (rep.temporal_warning) {
      if (rep.spatial_warning) os << "; ";
      os << "time quadrature under-resolved: tau*dt = " << rep.tau_dt
         << " > 0.5";
    }
    rep.message = os.str();
  }
  return rep;
}

std::vector<double> geometric_tau_sweep(double tau_min, double ratio, int count) {
  if (tau_min <= 0 || ratio <= 1 || count < 1)
    throw ConfigError("tau sweep requires tau_min > 0, ratio > 1, count >= 1");
  std::vector<double> taus(count);
  double t = tau_min;
  for (int j = 0; j < count; ++j, t *= ratio) taus[j] = t;
  return taus;
}

}  // namespace encl
