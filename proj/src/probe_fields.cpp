#include "encl/probe_fields.hpp"

#include <cmath>

#include "encl/errors.hpp"
#include "encl/special.hpp"

namespace encl {

namespace {

double interp_value(const Grid& grid, const Eigen::VectorXd& values,
                    const Point& x) {
  const int dim = grid.dim();
  const double h = grid.h();
  int base[3] = {0, 0, 0};
  double frac[3] = {0, 0, 0};
  for (int a = 0; a < dim; ++a) {
    const double s = (x[a] - grid.origin()[a]) / h - 0.5;
    base[a] = static_cast<int>(std::floor(s));
    frac[a] = s - base[a];
  }
  const int kz = (dim == 3) ? 2 : 1;
  double total = 0, weight = 0;
  bool missing = false;
  for (int k = 0; k < kz; ++k)
    for (int j = 0; j < 2; ++j)
      for (int i = 0; i < 2; ++i) {
        const int c = grid.cell_index(base[0] + i, base[1] + j,
                                      dim == 3 ? base[2] + k : 0);
        const double w = (i ? frac[0] : 1 - frac[0]) *
                         (j ? frac[1] : 1 - frac[1]) *
                         (dim == 3 ? (k ? frac[2] : 1 - frac[2]) : 1.0);
        if (c < 0) { missing = true; continue; }
        total += w * values[c];
        weight += w;
      }
  if (!missing) return total;
  if (weight > 1e-12) return total / weight;  // renormalize near the boundary
  const int c = grid.cell_at(x);
  if (c < 0) throw NumericalError("field evaluation outside the grid");
  return values[c];
}

// fundamental solution of (Laplace - tau) in 2D / 3D
double fundamental(double sqrt_tau, double r, int dim) {
  if (dim == 2) return bessel_k0(sqrt_tau * r) / (2.0 * M_PI);
  return std::exp(-sqrt_tau * r) / (4.0 * M_PI * r);
}

// d/dr of the fundamental solution
double fundamental_dr(double sqrt_tau, double r, int dim) {
  if (dim == 2) return -sqrt_tau * bessel_k1(sqrt_tau * r) / (2.0 * M_PI);
  return -std::exp(-sqrt_tau * r) * (sqrt_tau + 1.0 / r) / (4.0 * M_PI * r);
}

}  // namespace

double SolvedField::value(const Point& x) const {
  return interp_value(*grid, values, x);
}

Point SolvedField::gradient(const Point& x) const {
  const int dim = grid->dim();
  const double h = grid->h();
  Point g = Point::Zero();
  for (int a = 0; a < dim; ++a) {
    Point xp = x, xm = x;
    xp[a] += 0.5 * h;
    xm[a] -= 0.5 * h;
    g[a] = (interp_value(*grid, values, xp) - interp_value(*grid, values, xm)) / h;
  }
  return g;
}

ProbeField ProbeField::plane(const Point& omega, double tau, int dim) {
  double n2 = 0;
  for (int a = 0; a < dim; ++a) n2 += omega[a] * omega[a];
  if (std::abs(n2 - 1.0) > 1e-9)
    throw ConfigError("plane probe direction must be a unit vector");
  if (tau <= 0) throw ConfigError("probe requires tau > 0");
  ProbeField p;
  p.variant_ = Variant::Plane;
  p.tau_ = tau;
  p.dim_ = dim;
  p.anchor_ = omega;
  if (dim == 2) p.anchor_[2] = 0;
  return p;
}

ProbeField ProbeField::point_source(const Point& p, double tau, int dim,
                                    const Domain* outside_of) {
  if (tau <= 0) throw ConfigError("probe requires tau > 0");
  if (outside_of != nullptr) {
    const double margin = outside_of->distance_to_boundary(p);
    if (margin > -1e-12)
      throw ConfigError("point-source location must lie outside the domain");
  }
  ProbeField f;
  f.variant_ = Variant::PointSource;
  f.tau_ = tau;
  f.dim_ = dim;
  f.anchor_ = p;
  if (dim == 2) f.anchor_[2] = 0;
  return f;
}

ProbeField ProbeField::growing(const Point& y, double tau, int dim) {
  if (tau <= 0) throw ConfigError("probe requires tau > 0");
  ProbeField f;
  f.variant_ = Variant::Growing;
  f.tau_ = tau;
  f.dim_ = dim;
  f.anchor_ = y;
  if (dim == 2) f.anchor_[2] = 0;
  return f;
}

ProbeField ProbeField::solved(std::shared_ptr<SolvedField> field, double tau) {
  if (!field || field->grid == nullptr)
    throw ConfigError("solved probe requires a field on a grid");
  ProbeField f;
  f.variant_ = Variant::Solved;
  f.tau_ = tau;
  f.dim_ = field->grid->dim();
  f.field_ = std::move(field);
  return f;
}

double ProbeField::value(const Point& x) const {
  const double st = std::sqrt(tau_);
  switch (variant_) {
    case Variant::Solved:
      return field_->value(x);
    case Variant::Plane: {
      double dot = 0;
      for (int a = 0; a < dim_; ++a) dot += x[a] * anchor_[a];
      return std::exp(st * dot);
    }
    case Variant::PointSource: {
      const double r = (x - anchor_).norm();
      if (dim_ == 2) return bessel_k0(st * r);
      return std::exp(-st * r) / r;
    }
    case Variant::Growing: {
      const double r = (x - anchor_).norm();
      if (dim_ == 2) return bessel_i0(st * r);
      if (r < 1e-12) return 2.0 * st;
      return 2.0 * std::sinh(st * r) / r;
    }
  }
  return 0;
}

Point ProbeField::gradient(const Point& x) const {
  const double st = std::sqrt(tau_);
  switch (variant_) {
    case Variant::Solved:
      return field_->gradient(x);
    case Variant::Plane: {
      double dot = 0;
      for (int a = 0; a < dim_; ++a) dot += x[a] * anchor_[a];
      return st * std::exp(st * dot) * anchor_;
    }
    case Variant::PointSource: {
      Point d = x - anchor_;
      const double r = d.norm();
      double dvdr;
      if (dim_ == 2) {
        dvdr = -st * bessel_k1(st * r);
      } else {
        dvdr = -std::exp(-st * r) * (st + 1.0 / r) / r;
      }
      return (dvdr / r) * d;
    }
    case Variant::Growing: {
      Point d = x - anchor_;
      const double r = d.norm();
      if (r < 1e-12) return Point::Zero();
      double dvdr;
      if (dim_ == 2) {
        dvdr = st * bessel_i1(st * r);
      } else {
        const double z = st * r;
        dvdr = (2.0 / (r * r)) * (z * std::cosh(z) - std::sinh(z));
      }
      return (dvdr / r) * d;
    }
  }
  return Point::Zero();
}

LogReal ProbeField::log_value(const Point& x) const {
  const double st = std::sqrt(tau_);
  switch (variant_) {
    case Variant::Solved:
      return LogReal::from_double(field_->value(x));
    case Variant::Plane: {
      double dot = 0;
      for (int a = 0; a < dim_; ++a) dot += x[a] * anchor_[a];
      return LogReal(1, st * dot);
    }
    case Variant::PointSource: {
      const double r = (x - anchor_).norm();
      if (dim_ == 2) return LogReal(1, log_bessel_k0(st * r));
      return LogReal(1, -st * r - std::log(r));
    }
    case Variant::Growing: {
      const double r = (x - anchor_).norm();
      if (dim_ == 2) return LogReal(1, log_bessel_i0(st * r));
      if (r < 1e-12) return LogReal::from_double(2.0 * st);
      return LogReal(1, log_two_sinh(st * r) - std::log(r));
    }
  }
  return LogReal::zero();
}

namespace {

/// log(z cosh z - sinh z), z > 0, overflow-free.
double log_zcosh_minus_sinh(double z) {
  if (z < 1e-4) return 3.0 * std::log(z) - std::log(3.0);
  const double e = std::exp(-2.0 * z);
  // z cosh z - sinh z = (e^z / 2) * (z(1 + e^{-2z}) - (1 - e^{-2z}))
  return z - std::log(2.0) + std::log(z * (1.0 + e) - (1.0 - e));
}

}  // namespace

LogReal ProbeField::log_normal_derivative(const Point& x, const Point& nu) const {
  const double st = std::sqrt(tau_);
  switch (variant_) {
    case Variant::Solved: {
      const Point g = field_->gradient(x);
      double dot = 0;
      for (int a = 0; a < dim_; ++a) dot += g[a] * nu[a];
      return LogReal::from_double(dot);
    }
    case Variant::Plane: {
      double dot = 0, wn = 0;
      for (int a = 0; a < dim_; ++a) {
        dot += x[a] * anchor_[a];
        wn += anchor_[a] * nu[a];
      }
      return log_scaled_exp(st * dot, st * wn);
    }
    case Variant::PointSource: {
      Point d = x - anchor_;
      const double r = d.norm();
      double rn = 0;
      for (int a = 0; a < dim_; ++a) rn += d[a] * nu[a];
      rn /= r;
      if (dim_ == 2)
        return log_scaled_exp(log_bessel_k1(st * r), -st * rn);
      return log_scaled_exp(-st * r - std::log(r), -(st + 1.0 / r) * rn);
    }
    case Variant::Growing: {
      Point d = x - anchor_;
      const double r = d.norm();
      if (r < 1e-12) return LogReal::zero();
      double rn = 0;
      for (int a = 0; a < dim_; ++a) rn += d[a] * nu[a];
      rn /= r;
      if (dim_ == 2)
        return log_scaled_exp(log_bessel_i1(st * r), st * rn);
      // d/dr [2 sinh(st r)/r] = 2 (z cosh z - sinh z) / r^2, z = st r
      return log_scaled_exp(log_zcosh_minus_sinh(st * r) + std::log(2.0) -
                                2.0 * std::log(r),
                            rn);
    }
  }
  return LogReal::zero();
}

std::shared_ptr<SolvedField> solve_gamma_helmholtz(const Grid& grid,
                                                   const ConductivitySpec& cond,
                                                   const InclusionScene& scene,
                                                   const TransformedTrace& g,
                                                   double tau) {
  if (tau <= 0) throw ConfigError("helmholtz solve requires tau > 0");
  const int n_cells = grid.num_cells();
  FvOperator op(grid, cond, scene);
  Eigen::SparseMatrix<double> system = op.stiffness();
  const double tv = tau * grid.cell_volume();
  for (int c = 0; c < n_cells; ++c) system.coeffRef(c, c) += tv;
  system.makeCompressed();
  LinearSolver solver(system, 20 * n_cells);

  const Eigen::VectorXd b = op.boundary_load(g.g);
  Eigen::VectorXd u = solver.solve(b);
  if (op.has_offdiagonal()) {
    for (int it = 0; it < 30; ++it) {
      Eigen::VectorXd next = solver.solve(b + op.offdiagonal_load(u));
      const double change = (next - u).norm();
      u = std::move(next);
      if (change <= 1e-12 * std::max(1.0, u.norm())) break;
    }
  }

  auto field = std::make_shared<SolvedField>();
  field->grid = &grid;
  field->values = std::move(u);
  field->neumann = g.g;
  Eigen::VectorXd full_rhs = b;
  if (op.has_offdiagonal()) full_rhs += op.offdiagonal_load(field->values);
  const double denom = std::max(full_rhs.norm(), 1e-300);
  field->residual = (system * field->values - full_rhs).norm() / denom;
  if (field->residual > 1e-8)
    throw SolverError("helmholtz solve residual above tolerance",
                      field->residual);
  return field;
}

ProbeField solve_neumann_probe(const Grid& grid, const TransformedTrace& g,
                               double tau) {
  // identity coefficients: the scene's inclusion never enters
  InclusionScene trivial;
  trivial.domain = grid.domain();
  trivial.inclusion =
      Inclusion::ball(grid.domain().center, 1e-6 * grid.h());
  auto field = solve_gamma_helmholtz(grid, ConductivitySpec::identity(grid.dim()),
                                     trivial, g, tau);
  return ProbeField::solved(std::move(field), tau);
}

double grad_energy_over_inclusion(const Grid& grid, const SolvedField& field,
                                  const InclusionScene& scene) {
  const double vol = grid.cell_volume();
  double total = 0;
  for (int c = 0; c < grid.num_cells(); ++c) {
    const double frac = cell_fraction_in(scene.inclusion, grid.cell_center(c),
                                         grid.h(), grid.dim());
    if (frac == 0.0) continue;
    total += frac * vol * field.gradient(grid.cell_center(c)).squaredNorm();
  }
  return total;
}

// ---------------------------------------------------------------------------
// Nystrom layer machinery

namespace {

struct Quadrature {
  std::vector<Point> nodes;
  std::vector<Point> normals;
  std::vector<double> weights;
};

Quadrature ball_boundary_quadrature(const Domain& domain, int m) {
  if (domain.shape != DomainShape::Ball)
    throw UnsupportedGeometryError("layer potentials require a ball domain");
  if (m < 8) throw ConfigError("layer quadrature needs at least 8 nodes");
  Quadrature q;
  const double a = domain.radius;
  if (domain.dim == 2) {
    for (int i = 0; i < m; ++i) {
      const double phi = 2.0 * M_PI * i / m;
      Point nu(std::cos(phi), std::sin(phi), 0.0);
      q.nodes.push_back(domain.center + a * nu);
      q.normals.push_back(nu);
      q.weights.push_back(2.0 * M_PI * a / m);
    }
  } else {
    // Fibonacci sphere
    const double golden = M_PI * (3.0 - std::sqrt(5.0));
    for (int i = 0; i < m; ++i) {
      const double z = 1.0 - (2.0 * i + 1.0) / m;
      const double rho = std::sqrt(std::max(0.0, 1.0 - z * z));
      const double phi = golden * i;
      Point nu(rho * std::cos(phi), rho * std::sin(phi), z);
      q.nodes.push_back(domain.center + a * nu);
      q.normals.push_back(nu);
      q.weights.push_back(4.0 * M_PI * a * a / m);
    }
  }
  return q;
}

/// Kernel of the adjoint double-layer operator K'(tau): the normal
/// derivative at x of the fundamental solution centered at y.
double adjoint_kernel(const Point& x, const Point& nu_x, const Point& y,
                      double sqrt_tau, int dim) {
  const Point d = x - y;
  const double r = d.norm();
  const double rn = d.dot(nu_x) / r;
  return fundamental_dr(sqrt_tau, r, dim) * rn;
}

/// Diagonal (self-patch) contribution for the Nystrom rule.
double diagonal_entry(const Domain& domain, double sqrt_tau, double weight,
                      int dim) {
  const double a = domain.radius;
  if (dim == 2) {
    // smooth limit of the kernel as y -> x on a circle of radius a
    return weight * (-1.0 / (4.0 * M_PI * a));
  }
  // integrate the kernel over a disk-equivalent patch of area `weight`
  // around the node: with rho the patch radius and c = sqrt(tau),
  // int_patch -(e^{-c r}/(4 pi)) (c/r + 1/r^2) (r / 2a) dA
  // in local polar coordinates (dA = 2 pi s ds, r ~ s, r/(2a) chord factor)
  const double c = sqrt_tau;
  const double rho = std::sqrt(weight / M_PI);
  // int_0^rho e^{-c s}(c s + 1) ds = (1 - (1 + c rho) e^{-c rho})/c
  //                                 + (1 - e^{-c rho})/c
  const double e = std::exp(-c * rho);
  const double part = (1.0 - (1.0 + c * rho) * e) / c + (1.0 - e) / c;
  return -(1.0 / (4.0 * a)) * part;
}

Eigen::MatrixXd adjoint_matrix(const Quadrature& q, const Domain& domain,
                               double tau) {
  const double st = std::sqrt(tau);
  const int m = static_cast<int>(q.nodes.size());
  Eigen::MatrixXd k(m, m);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) {
      if (i == j) {
        k(i, j) = diagonal_entry(domain, st, q.weights[j], domain.dim);
      } else {
        k(i, j) = q.weights[j] *
                  adjoint_kernel(q.nodes[i], q.normals[i], q.nodes[j], st,
                                 domain.dim);
      }
    }
  return k;
}

}  // namespace

LayerDensity solve_layer_density(const Domain& domain,
                                 const std::function<double(const Point&)>& g,
                                 double tau, int m) {
  if (tau <= 0) throw ConfigError("layer solve requires tau > 0");
  Quadrature q = ball_boundary_quadrature(domain, m);
  const Eigen::MatrixXd k = adjoint_matrix(q, domain, tau);
  Eigen::MatrixXd system = k;
  for (int i = 0; i < m; ++i) system(i, i) += 0.5;

  Eigen::VectorXd rhs(m);
  for (int i = 0; i < m; ++i) rhs[i] = g(q.nodes[i]);

  Eigen::PartialPivLU<Eigen::MatrixXd> lu(system);
  Eigen::VectorXd sigma = lu.solve(rhs);
  const double residual =
      (system * sigma - rhs).norm() / std::max(rhs.norm(), 1e-300);
  if (!(residual < 1e-10)) {
    // fall back to a conditioning diagnosis before giving up
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(system);
    const double cnd = svd.singularValues()(0) /
                       svd.singularValues()(svd.singularValues().size() - 1);
    if (cnd > 1e12)
      throw NumericalError("layer system ill-conditioned (cond > 1e12)");
    throw SolverError("layer solve residual above tolerance", residual);
  }

  LayerDensity out;
  out.tau = tau;
  out.dim = domain.dim;
  out.domain = domain;
  out.nodes = std::move(q.nodes);
  out.normals = std::move(q.normals);
  out.weights = std::move(q.weights);
  out.psi = 0.5 * sigma;  // psi = sigma/2 -> g as tau -> infinity
  out.residual = residual;
  return out;
}

LayerEvaluation evaluate_layer_field(const LayerDensity& density,
                                     const Point& x) {
  const double st = std::sqrt(density.tau);
  const int m = static_cast<int>(density.nodes.size());
  LayerEvaluation out;
  double min_dist = std::numeric_limits<double>::infinity();
  for (int i = 0; i < m; ++i) {
    const Point d = x - density.nodes[i];
    const double r = d.norm();
    min_dist = std::min(min_dist, r);
    const double sigma = 2.0 * density.psi[i];
    const double w = density.weights[i] * sigma;
    out.value += w * fundamental(st, r, density.dim);
    out.gradient += (w * fundamental_dr(st, r, density.dim) / r) * d;
  }
  out.boundary_distance =
      std::abs(density.domain.distance_to_boundary(x));
  const double spacing =
      density.dim == 2
          ? 2.0 * M_PI * density.domain.radius / m
          : std::sqrt(4.0 * M_PI) * density.domain.radius / std::sqrt(double(m));
  out.accuracy_warning = out.boundary_distance < 2.0 * spacing;
  (void)min_dist;
  return out;
}

namespace {

/// Nystrom matrix of the single-layer operator S(tau); the weakly singular
/// diagonal is the kernel integrated over a patch of the node's own weight.
Eigen::MatrixXd single_layer_matrix(const Quadrature& q, const Domain& domain,
                                    double tau) {
  const double c = std::sqrt(tau);
  const int m = static_cast<int>(q.nodes.size());
  Eigen::MatrixXd s(m, m);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) {
      if (i == j) {
        if (domain.dim == 2) {
          // 2 int_0^{w/2} K0(c t)/(2 pi) dt with the small-argument form
          const double l = 0.5 * q.weights[j];
          const double euler = 0.5772156649015329;
          s(i, j) = (l / M_PI) * (1.0 - euler - std::log(0.5 * c * l));
        } else {
          // disk patch of area w: int e^{-c t}/(4 pi t) 2 pi t dt
          const double rho = std::sqrt(q.weights[j] / M_PI);
          s(i, j) = (1.0 - std::exp(-c * rho)) / (2.0 * c);
        }
      } else {
        const double r = (q.nodes[i] - q.nodes[j]).norm();
        s(i, j) = q.weights[j] * fundamental(c, r, domain.dim);
      }
    }
  return s;
}

}  // namespace

double layer_operator_norm(const Domain& domain, double tau, int m,
                           int iterations) {
  Quadrature q = ball_boundary_quadrature(domain, m);
  const Eigen::MatrixXd k = single_layer_matrix(q, domain, tau);
  // power iteration on K^T K for the spectral norm
  Eigen::VectorXd v = Eigen::VectorXd::Ones(m).normalized();
  double norm2 = 0;
  for (int it = 0; it < iterations; ++it) {
    Eigen::VectorXd w = k.transpose() * (k * v);
    norm2 = w.norm();
    if (norm2 == 0) return 0;
    v = w / norm2;
  }
  return std::sqrt(norm2);
}

}  // namespace encl
