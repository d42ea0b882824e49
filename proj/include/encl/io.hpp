#pragma once

#include <string>
#include <vector>

#include "encl/forward_heat.hpp"
#include "encl/indicator.hpp"
#include "encl/oracles.hpp"
#include "encl/probe_fields.hpp"
#include "encl/transform.hpp"

namespace encl {

/// FNV-1a hash of the canonical config text, rendered as 16 hex digits.
/// Stamped into every output header so artifacts from different configs
/// cannot be mixed silently.
std::string config_hash(const std::string& canonical_text);

void write_trace_csv(const std::string& path, const BoundaryTrace& trace,
                     int dim, const std::string& hash);

void write_transformed_csv(const std::string& path, const Grid& grid,
                           const std::vector<TransformedTrace>& traces,
                           const std::string& hash);

void write_indicator_csv(const std::string& path,
                         const std::vector<IndicatorSample>& samples,
                         const std::string& hash);

void write_asymptotic_csv(const std::string& path,
                          const std::vector<AsymptoticCheck>& checks,
                          const std::string& hash);

void write_layer_density_csv(const std::string& path,
                             const LayerDensity& density,
                             const std::string& hash);

}  // namespace encl
