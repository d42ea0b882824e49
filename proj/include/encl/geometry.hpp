#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "encl/errors.hpp"

namespace encl {

// Points live in R^3 throughout; in 2D runs the z component is zero and
// ignored.  The runtime dimension travels with the domain.
using Point = Eigen::Vector3d;

enum class DomainShape { Ball, Box };

struct Domain {
  DomainShape shape = DomainShape::Ball;
  int dim = 2;
  // ball
  Point center = Point::Zero();
  double radius = 1.0;
  // box
  Point lo = Point::Zero();
  Point hi = Point::Zero();

  static Domain ball(const Point& center, double radius, int dim);
  static Domain box(const Point& lo, const Point& hi, int dim);

  bool contains(const Point& x) const;
  /// Bounding box of the domain (tight).
  void bounding_box(Point& lo_out, Point& hi_out) const;
  /// Signed surface measure |dOmega| in closed form.
  double boundary_measure() const;
  /// Distance from an interior point to the boundary.
  double distance_to_boundary(const Point& x) const;
};

enum class InclusionShape { Ball, Ellipse };

struct Inclusion {
  InclusionShape shape = InclusionShape::Ball;
  Point center = Point::Zero();
  double radius = 0.3;
  // ellipse (2D): semi-axes and rotation angle about z
  Eigen::Vector2d semi_axes = Eigen::Vector2d(0.3, 0.2);
  double rotation = 0.0;

  static Inclusion ball(const Point& center, double radius);
  static Inclusion ellipse(const Point& center, const Eigen::Vector2d& semi_axes,
                           double rotation);

  bool contains(const Point& x) const;
};

/// Analytic description of the body and its inclusion, with the exact
/// geometric functionals every reconstruction is judged against.
struct InclusionScene {
  Domain domain;
  Inclusion inclusion;

  /// Throws ConfigError unless closure(D) is strictly inside Omega.
  void validate() const;
};

double depth(const InclusionScene& scene);
double support_function(const InclusionScene& scene, const Point& omega);
double point_distance(const InclusionScene& scene, const Point& p);
double enclosing_radius(const InclusionScene& scene, const Point& y);

struct BoundaryFacet {
  int cell = -1;           // compact index of the adjacent inside cell
  Point center;            // facet midpoint
  Point normal;            // snapped outward normal (axis direction)
  double measure = 0.0;    // h^{d-1}, projected for staircase ball boundaries
};

/// Uniform Cartesian discretization of Omega: inside-cell mask, compact cell
/// numbering, boundary facet list, and the time grid shared by all solvers.
class Grid {
public:
  Grid(const Domain& domain, int n, double T, int n_time);

  const Domain& domain() const { return domain_; }
  int dim() const { return domain_.dim; }
  int n() const { return n_; }
  double h() const { return h_; }
  double T() const { return T_; }
  int n_time() const { return n_time_; }
  double dt() const { return T_ / n_time_; }
  double cell_volume() const { return cell_volume_; }

  int num_cells() const { return static_cast<int>(cell_centers_.size()); }
  const Point& cell_center(int c) const { return cell_centers_[c]; }
  const std::vector<BoundaryFacet>& facets() const { return facets_; }
  double facet_measure_sum() const;

  const Point& origin() const { return origin_; }

  /// Compact index of the inside cell containing x, or -1.
  int cell_at(const Point& x) const;

  /// Compact index of lattice cell (i, j, k), or -1 when absent.
  int cell_index(int i, int j, int k) const;

  /// Neighbor of compact cell c across axis a in direction s (+1/-1);
  /// -1 when the neighbor is outside Omega or the bounding box.
  int neighbor(int c, int axis, int sign) const;

private:
  Domain domain_;
  int n_;
  double h_;
  double T_;
  int n_time_;
  double cell_volume_;
  Point origin_;
  std::vector<Point> cell_centers_;
  std::vector<int> compact_of_raw_;   // raw lattice index -> compact or -1
  std::vector<std::int64_t> raw_of_compact_;
  std::vector<BoundaryFacet> facets_;

  std::int64_t raw_index(int i, int j, int k) const;
};

Grid build_grid(const Domain& domain, int n, double T, int n_time);

/// Fraction of a cell's volume inside D, by s^d midpoint subsampling.
double cell_fraction_in(const Inclusion& d, const Point& cell_center, double h,
                        int dim, int s = 4);

}  // namespace encl
