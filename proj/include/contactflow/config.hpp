#pragma once

#include "contactflow/dynamics.hpp"

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace contactflow {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ScenarioConfig {
  std::string name = "dissipative";
  double gamma = 1.0;
  std::string potential = "linear";
  std::string metric = "identity";  // sampler scenarios
  int dof = 2;
  std::optional<double> box_halfwidth;  // chart box override
};

/**
 * One batch run: scenario, suites, sampling, integrator, thresholds.
 * Fixed seed means byte-identical report.
 */
struct RunConfig {
  ScenarioConfig scenario;
  std::vector<std::string> suites;
  int samples = 50;
  std::uint64_t seed = 42;
  FlowOptions integrator;
  std::map<std::string, double> thresholds;  // per-identity overrides
  std::string report_name = "report.json";
};

/// Parse a config JSON document; throws ConfigError on malformed input or
/// out-of-range values (unknown suites are rejected later, at dispatch).
RunConfig parse_config_text(const std::string& text);
RunConfig parse_config_file(const std::string& path);

}  // namespace contactflow
