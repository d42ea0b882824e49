#pragma once

#include <optional>
#include <string>
#include <vector>

#include "encl/conductivity.hpp"
#include "encl/geometry.hpp"
#include "encl/probe_fields.hpp"
#include "encl/transform.hpp"

namespace encl {

/// One evaluation of the boundary indicator at a single tau, stored as
/// (sign, log|I|) so growing probes never overflow.
struct IndicatorSample {
  double tau = 0;
  int sign = 0;                 // 0 = indeterminate (below the noise floor)
  double log_abs = -std::numeric_limits<double>::infinity();
  /// log|I| after time-profile normalization (defaults to log_abs); the
  /// extraction reads this column.
  double log_abs_corrected = -std::numeric_limits<double>::infinity();
  double log_summand_scale = -std::numeric_limits<double>::infinity();
  std::string theorem;          // "T1.1".."T1.4"
  GuardReport guard;
};

/// Facet quadrature of (g v - w dv/dnu) in log space.  For solved probes the
/// normal derivative is the probe's own Neumann data and the trace value is
/// the boundary-cell value, which keeps the discrete identity exact.
IndicatorSample assemble_indicator(const TransformedTrace& wg,
                                   const ProbeField& probe, const Grid& grid,
                                   const std::string& theorem = std::string());

struct ExtractionResult {
  double estimate = 0;           // coefficient a of the fit log|I| = a 2sqrt(tau) + b log tau + c
  double pairwise_estimate = 0;  // mean of the last K pairwise slopes
  std::vector<double> slopes;    // pairwise slope sequence on the used samples
  double fit_b = 0;
  double fit_c = 0;
  double fit_residual = 0;       // RMS residual of the fit
  bool sign_consistent = true;   // false when early samples had the opposite sign
  bool estimator_disagreement = false;  // fit vs pairwise differ by > 10%
  int indicator_sign = 0;        // common sign of the used samples
  std::string theorem;
  std::optional<double> truth;
  std::vector<double> taus;      // taus actually used
  std::vector<double> log_abs;   // corrected log|I| actually used
};

/// Extract the 1/(2 sqrt(tau)) log|I| limit from a sweep of samples.
/// Indeterminate samples are dropped; extraction runs on the longest
/// constant-sign suffix.  Throws InsufficientDataError (< 4 usable samples)
/// or SignInconsistencyError (sign flips leave no usable suffix).
ExtractionResult extract_limit(const std::vector<IndicatorSample>& samples,
                               int last_k = 3);

struct IdentityReport {
  double lhs = 0;            // int (g v - w dv/dnu)
  double rhs = 0;
  double nd_term = 0;        // int (g v - p dv/dnu)
  double volume_term = 0;    // int (gamma - I) grad v . grad eps
  double tail_term = 0;      // discrete e^{-tau T} remainder
  double relative_mismatch = 0;
  double remainder_fraction = 0;  // |volume + tail| / |lhs|
};

/// Checks the basic identity at one tau on one grid.  w_vol is the matched
/// volume transform of the forward solution and u_final its last time level;
/// exact (to solver tolerance) for diagonal conductivity tensors.
IdentityReport verify_basic_identity(const Grid& grid,
                                     const ConductivitySpec& cond,
                                     const InclusionScene& scene,
                                     const TransformedTrace& wg,
                                     const Eigen::VectorXd& w_vol,
                                     const Eigen::VectorXd& u_final,
                                     double tau);

struct BoundsReport {
  double lower = 0;   // int_D (I - gamma^{-1}) grad v . grad v
  double middle = 0;  // int g (v - p)
  double upper = 0;   // int_D (gamma - I) grad v . grad v
  double slack = 0;   // 0.05 max(|L|, |U|)
  bool holds = false;
};

/// Two-sided energy bounds L <= M <= U at one tau.
BoundsReport verify_two_sided_bounds(const Grid& grid,
                                     const ConductivitySpec& cond,
                                     const InclusionScene& scene,
                                     const TransformedTrace& g, double tau);

}  // namespace encl
