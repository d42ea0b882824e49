#pragma once

#include <Eigen/Dense>
#include <optional>
#include <vector>

#include "encl/geometry.hpp"

namespace encl {

enum class ContrastClass { A1, A2, Indefinite };

/// Conductivity field: identity background, constant symmetric
/// positive-definite tensor on the inclusion, blended on cut cells.
struct ConductivitySpec {
  Eigen::MatrixXd inclusion_tensor;  // d x d
  ContrastClass contrast_class = ContrastClass::Indefinite;

  static ConductivitySpec identity(int dim);
  static ConductivitySpec scalar(double kappa, int dim);
  /// Validates symmetry, positive definiteness, and the declared class
  /// against the tensor's spectrum.  Throws ConfigError on violation.
  static ConductivitySpec make(const Eigen::MatrixXd& tensor, ContrastClass cls);

  bool is_identity() const;
  int dim() const { return static_cast<int>(inclusion_tensor.rows()); }
};

Eigen::MatrixXd sample_conductivity(const ConductivitySpec& spec,
                                    const InclusionScene& scene, const Point& x);

/// Tensor at a cell: identity + fraction * (tensor - I), fraction from
/// cell_fraction_in.  The discretization-facing variant of sample_conductivity.
Eigen::MatrixXd cell_conductivity(const ConductivitySpec& spec,
                                  const InclusionScene& scene,
                                  const Point& cell_center, double h, int dim,
                                  int subsample = 4);

enum class PhiVariant { One, Ramp };

struct FluxSpec {
  enum class Variant { Constant, TimePower, ProbeFlux } variant = Variant::Constant;
  double constant = 1.0;     // Constant: f = a
  int power = 1;             // TimePower: f = t^k
  PhiVariant phi = PhiVariant::One;  // ProbeFlux time profile
  double mu = 1.0;           // declared decay exponent for admissibility

  static FluxSpec constant_flux(double a, double mu = 1.0);
  static FluxSpec time_power(int k, double mu);
  static FluxSpec probe_flux(PhiVariant phi);
};

double phi_value(PhiVariant phi, double t);

/// Closed-form transform of the time profile: int_0^T e^{-tau t} phi(t) dt.
double phi_transform_exact(PhiVariant phi, double tau, double T);

class ProbeField;  // probe_fields.hpp

/// f(x, t) at a boundary point.  probe must be supplied (with matching tau)
/// for the ProbeFlux variant; the flux is then (grad v . nu) phi(t).
double flux_value(const FluxSpec& spec, const Point& x, const Point& normal,
                  double t, double tau, const ProbeField* probe = nullptr);

struct AdmissibilityReport {
  bool admissible = true;
  double min_scaled = 0.0;  // min over samples and tau of tau^mu g(x; tau)
  double max_scaled = 0.0;
  std::vector<double> tau_grid;
  std::vector<double> min_per_tau;
  std::vector<double> max_per_tau;
};

/// Checks tau^mu * int e^{-tau t} f dt stays inside fixed positive bounds
/// across the tau grid at sampled boundary points.
AdmissibilityReport verify_flux_admissibility(const FluxSpec& spec,
                                              const std::vector<double>& tau_grid,
                                              double T,
                                              const std::vector<Point>& samples,
                                              const std::vector<Point>& normals);

}  // namespace encl
