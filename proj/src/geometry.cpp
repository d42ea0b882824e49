#include "encl/geometry.hpp"

#include <algorithm>
#include <cmath>

namespace encl {

namespace {

Eigen::Matrix2d ellipse_axes_matrix(const Inclusion& e) {
  Eigen::Matrix2d rot;
  rot << std::cos(e.rotation), -std::sin(e.rotation),
         std::sin(e.rotation),  std::cos(e.rotation);
  return rot * e.semi_axes.asDiagonal();
}

Point ellipse_point(const Inclusion& e, double phi) {
  const Eigen::Matrix2d a = ellipse_axes_matrix(e);
  const Eigen::Vector2d q = a * Eigen::Vector2d(std::cos(phi), std::sin(phi));
  return e.center + Point(q.x(), q.y(), 0.0);
}

/// Minimize a smooth periodic objective over [0, 2pi) by coarse sampling
/// followed by golden-section refinement.
template <typename F>
double minimize_periodic(F f, double tol = 1e-12) {
  const double two_pi = 2.0 * M_PI;
  const int samples = 720;
  double best_phi = 0.0, best = f(0.0);
  for (int i = 1; i < samples; ++i) {
    const double phi = two_pi * i / samples;
    const double val = f(phi);
    if (val < best) { best = val; best_phi = phi; }
  }
  double a = best_phi - two_pi / samples;
  double b = best_phi + two_pi / samples;
  const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - gr * (b - a), d = a + gr * (b - a);
  while (b - a > tol) {
    if (f(c) < f(d)) { b = d; } else { a = c; }
    c = b - gr * (b - a);
    d = a + gr * (b - a);
  }
  return f(0.5 * (a + b));
}

}  // namespace

Domain Domain::ball(const Point& center, double radius, int dim) {
  if (radius <= 0) throw ConfigError("domain ball radius must be positive");
  if (dim != 2 && dim != 3) throw ConfigError("dimension must be 2 or 3");
  Domain d;
  d.shape = DomainShape::Ball;
  d.dim = dim;
  d.center = center;
  d.radius = radius;
  return d;
}

Domain Domain::box(const Point& lo, const Point& hi, int dim) {
  if (dim != 2 && dim != 3) throw ConfigError("dimension must be 2 or 3");
  for (int a = 0; a < dim; ++a)
    if (!(lo[a] < hi[a])) throw ConfigError("domain box requires lo < hi");
  Domain d;
  d.shape = DomainShape::Box;
  d.dim = dim;
  d.lo = lo;
  d.hi = hi;
  return d;
}

bool Domain::contains(const Point& x) const {
  if (shape == DomainShape::Ball) {
    double r2 = 0;
    for (int a = 0; a < dim; ++a) r2 += (x[a] - center[a]) * (x[a] - center[a]);
    return r2 < radius * radius;
  }
  for (int a = 0; a < dim; ++a)
    if (x[a] <= lo[a] || x[a] >= hi[a]) return false;
  return true;
}

void Domain::bounding_box(Point& lo_out, Point& hi_out) const {
  if (shape == DomainShape::Ball) {
    lo_out = center - Point::Constant(radius);
    hi_out = center + Point::Constant(radius);
  } else {
    lo_out = lo;
    hi_out = hi;
  }
  if (dim == 2) { lo_out[2] = 0; hi_out[2] = 0; }
}

double Domain::boundary_measure() const {
  if (shape == DomainShape::Ball)
    return dim == 2 ? 2.0 * M_PI * radius : 4.0 * M_PI * radius * radius;
  if (dim == 2) {
    const double sx = hi[0] - lo[0], sy = hi[1] - lo[1];
    return 2.0 * (sx + sy);
  }
  const double sx = hi[0] - lo[0], sy = hi[1] - lo[1], sz = hi[2] - lo[2];
  return 2.0 * (sx * sy + sy * sz + sx * sz);
}

double Domain::distance_to_boundary(const Point& x) const {
  if (shape == DomainShape::Ball) {
    double r = 0;
    for (int a = 0; a < dim; ++a) r += (x[a] - center[a]) * (x[a] - center[a]);
    return radius - std::sqrt(r);
  }
  double d = std::numeric_limits<double>::infinity();
  for (int a = 0; a < dim; ++a)
    d = std::min({d, x[a] - lo[a], hi[a] - x[a]});
  return d;
}

Inclusion Inclusion::ball(const Point& center, double radius) {
  if (radius <= 0) throw ConfigError("inclusion ball radius must be positive");
  Inclusion d;
  d.shape = InclusionShape::Ball;
  d.center = center;
  d.radius = radius;
  return d;
}

Inclusion Inclusion::ellipse(const Point& center, const Eigen::Vector2d& semi_axes,
                             double rotation) {
  if (semi_axes.minCoeff() <= 0)
    throw ConfigError("ellipse semi-axes must be positive");
  Inclusion d;
  d.shape = InclusionShape::Ellipse;
  d.center = center;
  d.semi_axes = semi_axes;
  d.rotation = rotation;
  return d;
}

bool Inclusion::contains(const Point& x) const {
  if (shape == InclusionShape::Ball) return (x - center).norm() < radius;
  const Eigen::Matrix2d a_inv = ellipse_axes_matrix(*this).inverse();
  const Eigen::Vector2d q = a_inv * Eigen::Vector2d(x.x() - center.x(),
                                                    x.y() - center.y());
  return q.squaredNorm() < 1.0;
}

void InclusionScene::validate() const {
  if (inclusion.shape == InclusionShape::Ellipse && domain.dim != 2)
    throw UnsupportedGeometryError("ellipse inclusions are 2D only");
  if (depth(*this) <= 0)
    throw ConfigError("inclusion must be strictly inside the domain");
}

double depth(const InclusionScene& scene) {
  const Domain& dom = scene.domain;
  const Inclusion& inc = scene.inclusion;
  if (inc.shape == InclusionShape::Ball) {
    const double off = (inc.center - dom.center).head(dom.dim == 2 ? 2 : 3).norm();
    if (dom.shape == DomainShape::Ball)
      return dom.radius - off - inc.radius;
    double d = std::numeric_limits<double>::infinity();
    for (int a = 0; a < dom.dim; ++a)
      d = std::min({d, inc.center[a] - dom.lo[a], dom.hi[a] - inc.center[a]});
    return d - inc.radius;
  }
  if (dom.shape != DomainShape::Ball)
    throw UnsupportedGeometryError("depth: ellipse inclusion requires a ball domain");
  // depth = R - max_{x in dD} |x - c_Omega|, maximized over the boundary angle
  const double reach = -minimize_periodic([&](double phi) {
    return -(ellipse_point(inc, phi) - dom.center).norm();
  }, 1e-10);
  return dom.radius - reach;
}

double support_function(const InclusionScene& scene, const Point& omega) {
  const int dim = scene.domain.dim;
  double n2 = 0;
  for (int a = 0; a < dim; ++a) n2 += omega[a] * omega[a];
  if (std::abs(n2 - 1.0) > 1e-9)
    throw ConfigError("support_function: direction must be a unit vector");
  const Inclusion& inc = scene.inclusion;
  double c_dot = 0;
  for (int a = 0; a < dim; ++a) c_dot += inc.center[a] * omega[a];
  if (inc.shape == InclusionShape::Ball) return c_dot + inc.radius;
  const Eigen::Matrix2d at = ellipse_axes_matrix(inc).transpose();
  return c_dot + (at * Eigen::Vector2d(omega.x(), omega.y())).norm();
}

double point_distance(const InclusionScene& scene, const Point& p) {
  const Inclusion& inc = scene.inclusion;
  if (inc.shape == InclusionShape::Ball)
    return std::max((p - inc.center).norm() - inc.radius, 0.0);
  if (inc.contains(p)) return 0.0;
  return minimize_periodic([&](double phi) {
    return (ellipse_point(inc, phi) - p).norm();
  });
}

double enclosing_radius(const InclusionScene& scene, const Point& y) {
  const Inclusion& inc = scene.inclusion;
  if (inc.shape == InclusionShape::Ball)
    return (y - inc.center).norm() + inc.radius;
  return -minimize_periodic([&](double phi) {
    return -(ellipse_point(inc, phi) - y).norm();
  });
}

Grid::Grid(const Domain& domain, int n, double T, int n_time)
    : domain_(domain), n_(n), T_(T), n_time_(n_time) {
  if (n < 8) throw ConfigError("grid resolution n must be >= 8");
  if (n_time < 8) throw ConfigError("time step count must be >= 8");
  if (T <= 0) throw ConfigError("time horizon must be positive");

  Point lo, hi;
  domain.bounding_box(lo, hi);
  const int dim = domain.dim;
  const double side = hi[0] - lo[0];
  for (int a = 1; a < dim; ++a)
    if (std::abs((hi[a] - lo[a]) - side) > 1e-12 * side)
      throw ConfigError("grid requires equal side lengths per axis");
  h_ = side / n;
  origin_ = lo;
  cell_volume_ = std::pow(h_, dim);

  const int nz = (dim == 3) ? n : 1;
  compact_of_raw_.assign(static_cast<std::size_t>(n) * n * nz, -1);
  for (int k = 0; k < nz; ++k)
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i) {
        Point c = origin_ + h_ * Point(i + 0.5, j + 0.5, dim == 3 ? k + 0.5 : 0.0);
        if (dim == 2) c[2] = 0;
        if (domain.contains(c)) {
          compact_of_raw_[raw_index(i, j, k)] =
              static_cast<int>(cell_centers_.size());
          raw_of_compact_.push_back(raw_index(i, j, k));
          cell_centers_.push_back(c);
        }
      }

  // boundary facets: faces between an inside cell and anything not inside
  const double face_area = std::pow(h_, dim - 1);
  for (int c = 0; c < num_cells(); ++c) {
    const std::int64_t raw = raw_of_compact_[c];
    const int i = static_cast<int>(raw % n);
    const int j = static_cast<int>((raw / n) % n);
    const int k = static_cast<int>(raw / (static_cast<std::int64_t>(n) * n));
    const int idx[3] = {i, j, k};
    for (int a = 0; a < dim; ++a)
      for (int s = -1; s <= 1; s += 2) {
        int nb[3] = {i, j, k};
        nb[a] += s;
        bool outside = nb[a] < 0 || nb[a] >= n;
        if (!outside)
          outside = compact_of_raw_[raw_index(nb[0], nb[1], nb[2])] < 0;
        if (!outside) continue;
        BoundaryFacet f;
        f.cell = c;
        f.center = cell_center(c);
        f.center[a] += s * 0.5 * h_;
        f.normal = Point::Zero();
        f.normal[a] = s;
        f.measure = face_area;
        if (domain.shape == DomainShape::Ball) {
          // projected measure: staircase faces over-count the curved
          // boundary by the normal misalignment factor
          Point nu = f.center - domain.center;
          if (dim == 2) nu[2] = 0;
          const double len = nu.norm();
          if (len > 0) f.measure = face_area * std::abs(nu[a]) / len;
        }
        facets_.push_back(f);
        (void)idx;
      }
  }
}

std::int64_t Grid::raw_index(int i, int j, int k) const {
  return i + static_cast<std::int64_t>(n_) * (j + static_cast<std::int64_t>(n_) * k);
}

double Grid::facet_measure_sum() const {
  double s = 0;
  for (const auto& f : facets_) s += f.measure;
  return s;
}

int Grid::cell_at(const Point& x) const {
  const int dim = domain_.dim;
  int idx[3] = {0, 0, 0};
  for (int a = 0; a < dim; ++a) {
    idx[a] = static_cast<int>(std::floor((x[a] - origin_[a]) / h_));
    if (idx[a] < 0 || idx[a] >= n_) return -1;
  }
  return compact_of_raw_[raw_index(idx[0], idx[1], idx[2])];
}

int Grid::cell_index(int i, int j, int k) const {
  const int nz = (domain_.dim == 3) ? n_ : 1;
  if (i < 0 || i >= n_ || j < 0 || j >= n_ || k < 0 || k >= nz) return -1;
  return compact_of_raw_[raw_index(i, j, k)];
}

int Grid::neighbor(int c, int axis, int sign) const {
  const std::int64_t raw = raw_of_compact_[c];
  int i = static_cast<int>(raw % n_);
  int j = static_cast<int>((raw / n_) % n_);
  int k = static_cast<int>(raw / (static_cast<std::int64_t>(n_) * n_));
  int idx[3] = {i, j, k};
  idx[axis] += sign;
  if (idx[axis] < 0 || idx[axis] >= n_) return -1;
  return compact_of_raw_[raw_index(idx[0], idx[1], idx[2])];
}

Grid build_grid(const Domain& domain, int n, double T, int n_time) {
  return Grid(domain, n, T, n_time);
}

double cell_fraction_in(const Inclusion& d, const Point& cell_center, double h,
                        int dim, int s) {
  int inside = 0, total = 0;
  const int sz = (dim == 3) ? s : 1;
  for (int k = 0; k < sz; ++k)
    for (int j = 0; j < s; ++j)
      for (int i = 0; i < s; ++i) {
        Point p = cell_center;
        p[0] += h * ((i + 0.5) / s - 0.5);
        p[1] += h * ((j + 0.5) / s - 0.5);
        if (dim == 3) p[2] += h * ((k + 0.5) / s - 0.5);
        if (d.contains(p)) ++inside;
        ++total;
      }
  return static_cast<double>(inside) / total;
}

}  // namespace encl
