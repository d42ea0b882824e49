#pragma once

#include <Eigen/Dense>
#include <optional>
#include <vector>

#include "encl/conductivity.hpp"
#include "encl/fv.hpp"
#include "encl/geometry.hpp"

namespace encl {

class ProbeField;

/// Boundary temperature and flux samples on (facet, time level) — the
/// measurement object of the inverse problem.
struct BoundaryTrace {
  Eigen::MatrixXd u;  // facets x (N_t + 1)
  Eigen::MatrixXd f;  // facets x (N_t + 1)
  std::vector<double> times;
  std::vector<BoundaryFacet> facets;
  double T = 0;
  double dt = 0;
};

struct HeatState {
  std::vector<Eigen::VectorXd> history;  // per time level, when stored
  Eigen::VectorXd final_field;           // u(., T)
  std::vector<double> energy;            // int u^2 per level
  std::vector<double> mass;              // int u per level
  double dt = 0;
  double cell_volume = 0;
};

struct ForwardOptions {
  bool store_history = true;
  /// Accumulate the scheme-matched volume transforms for these tau values
  /// while stepping (avoids keeping the full history in 3D).
  std::vector<double> transform_taus;
};

struct ForwardResult {
  BoundaryTrace trace;
  HeatState state;
  /// Matched volume transforms, one per requested tau.
  std::vector<Eigen::VectorXd> volume_transforms;
};

/// Backward-Euler solve of the Neumann heat problem with zero initial data.
/// tau must be supplied iff the flux is a probe flux (the flux then depends
/// on tau through the probe's normal derivative).
ForwardResult solve_forward(const Grid& grid, const ConductivitySpec& cond,
                            const InclusionScene& scene, const FluxSpec& flux,
                            std::optional<double> tau = std::nullopt,
                            const ProbeField* probe = nullptr,
                            const ForwardOptions& options = {});

std::vector<double> energy_history(const HeatState& state);

}  // namespace encl
