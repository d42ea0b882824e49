#include "encl/conductivity.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>

#include "encl/probe_fields.hpp"

namespace encl {

ConductivitySpec ConductivitySpec::identity(int dim) {
  ConductivitySpec s;
  s.inclusion_tensor = Eigen::MatrixXd::Identity(dim, dim);
  s.contrast_class = ContrastClass::Indefinite;
  return s;
}

ConductivitySpec ConductivitySpec::scalar(double kappa, int dim) {
  return make(kappa * Eigen::MatrixXd::Identity(dim, dim),
              kappa > 1 ? ContrastClass::A2
                        : (kappa < 1 ? ContrastClass::A1 : ContrastClass::Indefinite));
}

ConductivitySpec ConductivitySpec::make(const Eigen::MatrixXd& tensor,
                                        ContrastClass cls) {
  if (tensor.rows() != tensor.cols())
    throw ConfigError("conductivity tensor must be square");
  if (!tensor.isApprox(tensor.transpose(), 1e-12))
    throw ConfigError("conductivity tensor must be symmetric");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(tensor);
  if (es.eigenvalues().minCoeff() <= 0)
    throw ConfigError("conductivity tensor must be positive definite");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> contrast(
      tensor - Eigen::MatrixXd::Identity(tensor.rows(), tensor.cols()));
  if (cls == ContrastClass::A1 && contrast.eigenvalues().maxCoeff() >= 0)
    throw ConfigError("class A1 requires all eigenvalues of (tensor - I) < 0");
  if (cls == ContrastClass::A2 && contrast.eigenvalues().minCoeff() <= 0)
    throw ConfigError("class A2 requires all eigenvalues of (tensor - I) > 0");
  ConductivitySpec s;
  s.inclusion_tensor = tensor;
  s.contrast_class = cls;
  return s;
}

bool ConductivitySpec::is_identity() const {
  return inclusion_tensor.isApprox(
      Eigen::MatrixXd::Identity(inclusion_tensor.rows(), inclusion_tensor.cols()),
      1e-14);
}

Eigen::MatrixXd sample_conductivity(const ConductivitySpec& spec,
                                    const InclusionScene& scene, const Point& x) {
  const int d = spec.dim();
  if (scene.inclusion.contains(x)) return spec.inclusion_tensor;
  return Eigen::MatrixXd::Identity(d, d);
}

Eigen::MatrixXd cell_conductivity(const ConductivitySpec& spec,
                                  const InclusionScene& scene,
                                  const Point& cell_center, double h, int dim,
                                  int subsample) {
  const double frac =
      cell_fraction_in(scene.inclusion, cell_center, h, dim, subsample);
  const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(dim, dim);
  if (frac == 0.0) return id;
  if (frac == 1.0) return spec.inclusion_tensor;
  return id + frac * (spec.inclusion_tensor - id);
}

FluxSpec FluxSpec::constant_flux(double a, double mu) {
  if (a == 0) throw ConfigError("constant flux must be nonzero");
  FluxSpec f;
  f.variant = Variant::Constant;
  f.constant = a;
  f.mu = mu;
  return f;
}

FluxSpec FluxSpec::time_power(int k, double mu) {
  if (k < 0) throw ConfigError("time power must be >= 0");
  FluxSpec f;
  f.variant = Variant::TimePower;
  f.power = k;
  f.mu = mu;
  return f;
}

FluxSpec FluxSpec::probe_flux(PhiVariant phi) {
  FluxSpec f;
  f.variant = Variant::ProbeFlux;
  f.phi = phi;
  f.mu = (phi == PhiVariant::One) ? 1.0 : 2.0;
  return f;
}

double phi_value(PhiVariant phi, double t) {
  return phi == PhiVariant::One ? 1.0 : t;
}

double phi_transform_exact(PhiVariant phi, double tau, double T) {
  if (phi == PhiVariant::One) return (1.0 - std::exp(-tau * T)) / tau;
  return (1.0 - (1.0 + tau * T) * std::exp(-tau * T)) / (tau * tau);
}

double flux_value(const FluxSpec& spec, const Point& x, const Point& normal,
                  double t, double tau, const ProbeField* probe) {
  switch (spec.variant) {
    case FluxSpec::Variant::Constant:
      return spec.constant;
    case FluxSpec::Variant::TimePower:
      return std::pow(t, spec.power);
    case FluxSpec::Variant::ProbeFlux: {
      if (probe == nullptr)
        throw ConfigError("probe flux requires a probe field");
      if (std::abs(probe->tau() - tau) > 1e-12 * std::max(1.0, tau))
        throw ConfigError("probe flux: probe tau does not match");
      return probe->gradient(x).dot(normal) * phi_value(spec.phi, t);
    }
  }
  throw ConfigError("unknown flux variant");
}

namespace {

// int_0^T e^{-tau t} t^k dt in closed form
double time_power_transform(int k, double tau, double T) {
  double fact = 1.0;
  double sum = 1.0, term = 1.0;
  for (int j = 1; j <= k; ++j) {
    fact *= j;
    term *= tau * T / j;
    sum += term;
  }
  return fact / std::pow(tau, k + 1) * (1.0 - std::exp(-tau * T) * sum);
}

}  // namespace

AdmissibilityReport verify_flux_admissibility(const FluxSpec& spec,
                                              const std::vector<double>& tau_grid,
                                              double T,
                                              const std::vector<Point>& samples,
                                              const std::vector<Point>& normals) {
  if (tau_grid.size() < 4)
    throw ConfigError("admissibility check needs at least 4 tau values");
  for (std::size_t i = 1; i < tau_grid.size(); ++i)
    if (tau_grid[i] <= tau_grid[i - 1])
      throw ConfigError("tau grid must be increasing");
  (void)samples;
  (void)normals;

  AdmissibilityReport rep;
  rep.tau_grid = tau_grid;
  rep.min_scaled = std::numeric_limits<double>::infinity();
  rep.max_scaled = -std::numeric_limits<double>::infinity();
  for (double tau : tau_grid) {
    double g;
    switch (spec.variant) {
      case FluxSpec::Variant::Constant:
        g = spec.constant * (1.0 - std::exp(-tau * T)) / tau;
        break;
      case FluxSpec::Variant::TimePower:
        g = time_power_transform(spec.power, tau, T);
        break;
      case FluxSpec::Variant::ProbeFlux:
        // spatial factor varies with the probe; condition (1.6) concerns
        // the time profile only
        g = phi_transform_exact(spec.phi, tau, T);
        break;
      default:
        throw ConfigError("unknown flux variant");
    }
    const double scaled = std::pow(tau, spec.mu) * std::abs(g);
    rep.min_per_tau.push_back(scaled);
    rep.max_per_tau.push_back(scaled);
    rep.min_scaled = std::min(rep.min_scaled, scaled);
    rep.max_scaled = std::max(rep.max_scaled, scaled);
  }
  rep.admissible = rep.min_scaled > 0 && rep.max_scaled / rep.min_scaled < 10.0;
  return rep;
}

}  // namespace encl
