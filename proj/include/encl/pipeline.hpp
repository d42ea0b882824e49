#pragma once

#include <optional>
#include <string>
#include <vector>

#include "encl/config.hpp"
#include "encl/forward_heat.hpp"
#include "encl/indicator.hpp"
#include "encl/oracles.hpp"

namespace encl {

/// One reconstructed quantity: theorem tag, probe parameter, the indicator
/// sweep, and the extracted value converted to the geometric convention
/// (depth and point distance are positive lengths, the raw slope carries
/// the theorem's sign).
struct ReconstructionEntry {
  std::string theorem;
  Point param = Point::Zero();      // omega / p / y; unused for T1.1
  std::vector<IndicatorSample> samples;
  std::optional<ExtractionResult> extraction;
  double reported = 0;              // sign-converted estimate
  double truth = 0;                 // analytic value from the scene
  std::string error;                // stage-tagged failure, empty on success
};

struct ValidationReport {
  bool flux_admissible = false;
  std::optional<IdentityReport> identity;      // at the designated tau
  double identity_tau = 0;
  std::vector<BoundsReport> bounds;            // one per sweep tau
  std::vector<double> bounds_taus;
  std::vector<AsymptoticCheck> energy_checks;  // scaled-energy sequences
  bool all_pass = false;
};

struct RunSummary {
  std::string config_hash;
  std::string theorem;
  int dimension = 2;
  bool degraded = false;            // resolution guard fired on the sweep
  std::vector<ReconstructionEntry> entries;
  std::optional<ValidationReport> validation;
  std::string note;                 // e.g. no-inclusion verdict
};

/// Forward solve shared by all pipelines; stores matched volume transforms
/// for the given taus.
ForwardResult run_forward(const RunConfig& cfg, const Grid& grid,
                          const std::vector<double>& transform_taus,
                          std::optional<double> probe_tau = std::nullopt,
                          const ProbeField* probe = nullptr);

RunSummary run_reconstruction(const RunConfig& cfg);
RunSummary run_validation(const RunConfig& cfg);

/// The oracle-only suite: decay-slope fits and scaled local integrals
/// for the configured scene.
std::vector<AsymptoticCheck> run_oracles(const RunConfig& cfg);

/// log(c_exact / c_disc): correction removing the matched-transform
/// distortion of the time profile at one tau.  Returns 0 for profiles
/// without a closed form.
double transform_correction(const FluxSpec& flux, double tau, double T,
                            double dt, int n_time);

}  // namespace encl
