#pragma once

#include <optional>
#include <string>
#include <vector>

#include "encl/conductivity.hpp"
#include "encl/geometry.hpp"

namespace encl {

/// One run configuration, parsed from a single JSON file with exhaustive
/// schema validation: unknown keys, missing keys, and type mismatches are
/// all ConfigError with the offending key path in the message.
struct RunConfig {
  int dimension = 2;
  InclusionScene scene;
  ConductivitySpec conductivity = ConductivitySpec::identity(2);
  FluxSpec flux;
  int n = 128;
  int n_time = 256;
  double T = 1.0;
  double tau_min = 10.0;
  double tau_ratio = 1.3;
  int tau_count = 12;
  std::string theorem = "T1.1";  // T1.1 | T1.2 | T1.3 | T1.4
  std::vector<Point> directions;  // T1.2 omega list
  std::vector<Point> points;      // T1.3 p list
  std::vector<Point> centers;     // T1.4 y list
  std::string output_dir = "out";
  unsigned seed = 0;
  int workers = 1;

  std::string canonical_text;  // normalized JSON used for hashing
  std::string hash;

  std::vector<double> tau_sweep() const;
};

RunConfig load_config(const std::string& path);
RunConfig parse_config(const std::string& json_text);

/// The reference benchmark configuration (2D disk, off-center inclusion).
std::string benchmark_config_json();

}  // namespace encl
