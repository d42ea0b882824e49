#pragma once

#include <Eigen/Dense>
#include <functional>
#include <memory>
#include <vector>

#include "encl/conductivity.hpp"
#include "encl/fv.hpp"
#include "encl/geometry.hpp"
#include "encl/log_real.hpp"
#include "encl/transform.hpp"

namespace encl {

/// A solved field on the grid with multilinear interpolation for values and
/// centered differences for gradients.
struct SolvedField {
  const Grid* grid = nullptr;
  Eigen::VectorXd values;
  /// Facet Neumann data the field was solved with; indicator assembly uses
  /// this (not an interpolated gradient) so the discrete cancellation of
  /// the boundary carrier terms is exact.
  Eigen::VectorXd neumann;

  double value(const Point& x) const;
  Point gradient(const Point& x) const;
  /// Max relative residual of (A + tau V) u = b, checked at construction.
  double residual = 0;
};

/// A solution v of (Laplace - tau) v = 0 usable as a probe: the solved
/// Neumann field of (1.3) or one of the explicit families.  Explicit
/// variants expose log-scaled evaluation so the growing family never
/// overflows inside indicator arithmetic.
class ProbeField {
public:
  enum class Variant { Solved, Plane, PointSource, Growing };

  static ProbeField plane(const Point& omega, double tau, int dim);
  /// p must lie outside closure(Omega) when a domain is given.
  static ProbeField point_source(const Point& p, double tau, int dim,
                                 const Domain* outside_of = nullptr);
  static ProbeField growing(const Point& y, double tau, int dim);
  static ProbeField solved(std::shared_ptr<SolvedField> field, double tau);

  Variant variant() const { return variant_; }
  double tau() const { return tau_; }
  int dim() const { return dim_; }
  const Point& anchor() const { return anchor_; }

  double value(const Point& x) const;
  Point gradient(const Point& x) const;

  LogReal log_value(const Point& x) const;
  LogReal log_normal_derivative(const Point& x, const Point& nu) const;

  const SolvedField* solved_field() const { return field_.get(); }

private:
  Variant variant_ = Variant::Plane;
  double tau_ = 0;
  int dim_ = 2;
  Point anchor_ = Point::Zero();  // omega / p / y
  std::shared_ptr<SolvedField> field_;
};

/// Solve (Laplace - tau) v = 0 with dv/dnu = g on the staircase boundary.
ProbeField solve_neumann_probe(const Grid& grid, const TransformedTrace& g,
                               double tau);

/// Same finite-volume machinery with gamma coefficients: the auxiliary
/// solution p_f of (div gamma grad - tau) p = 0, gamma grad p . nu = g.
std::shared_ptr<SolvedField> solve_gamma_helmholtz(const Grid& grid,
                                                   const ConductivitySpec& cond,
                                                   const InclusionScene& scene,
                                                   const TransformedTrace& g,
                                                   double tau);

/// int_D |grad v|^2 by midpoint-over-cells with cut-cell volume fractions.
double grad_energy_over_inclusion(const Grid& grid, const SolvedField& field,
                                  const InclusionScene& scene);

// ---------------------------------------------------------------------------
// Single-layer potential route (Nystrom discretization of the second-kind
// boundary integral equation)

struct LayerDensity {
  double tau = 0;
  int dim = 2;
  Domain domain;
  std::vector<Point> nodes;
  std::vector<Point> normals;
  std::vector<double> weights;  // quadrature weights (arc length / area)
  Eigen::VectorXd psi;          // density, normalized so psi -> g as tau -> inf
  double residual = 0;
};

/// Nystrom solve of the second-kind equation on a ball boundary.
/// g is evaluated at the quadrature nodes via the supplied callable.
LayerDensity solve_layer_density(const Domain& domain,
                                 const std::function<double(const Point&)>& g,
                                 double tau, int m);

struct LayerEvaluation {
  double value = 0;
  Point gradient = Point::Zero();
  bool accuracy_warning = false;  // x within 2 node spacings of the boundary
  double boundary_distance = 0;
};

LayerEvaluation evaluate_layer_field(const LayerDensity& density, const Point& x);

/// Power-iteration estimate of the discrete operator norm of the
/// double-layer-type operator S(tau) on the ball boundary.
double layer_operator_norm(const Domain& domain, double tau, int m,
                           int iterations = 60);

}  // namespace encl
