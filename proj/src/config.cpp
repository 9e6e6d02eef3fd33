#include "contactflow/config.hpp"

#include <json.hpp>

#include <fstream>
#include <sstream>

namespace contactflow {

using nlohmann::json;

namespace {

template <typename T>
T get_or(const json& j, const char* key, T fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config: bad value for '") + key + "': " + e.what());
  }
}

}  // namespace

RunConfig parse_config_text(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config: not valid JSON: ") + e.what());
  }
  RunConfig cfg;
  if (j.contains("scenario")) {
    const json& s = j.at("scenario");
    cfg.scenario.name = get_or<std::string>(s, "name", cfg.scenario.name);
    cfg.scenario.gamma = get_or<double>(s, "gamma", cfg.scenario.gamma);
    cfg.scenario.potential = get_or<std::string>(s, "potential", cfg.scenario.potential);
    cfg.scenario.metric = get_or<std::string>(s, "metric", cfg.scenario.metric);
    cfg.scenario.dof = get_or<int>(s, "dof", cfg.scenario.dof);
    if (s.contains("box_halfwidth"))
      cfg.scenario.box_halfwidth = get_or<double>(s, "box_halfwidth", 0.0);
  }
  cfg.suites = get_or<std::vector<std::string>>(j, "suites", {});
  cfg.samples = get_or<int>(j, "samples", cfg.samples);
  cfg.seed = get_or<std::uint64_t>(j, "seed", cfg.seed);
  cfg.report_name = get_or<std::string>(j, "report", cfg.report_name);
  if (j.contains("integrator")) {
    const json& i = j.at("integrator");
    const std::string method = get_or<std::string>(i, "method", "rk45");
    if (method == "rk45")
      cfg.integrator.method = FlowOptions::Method::rk45;
    else if (method == "rk4")
      cfg.integrator.method = FlowOptions::Method::rk4;
    else
      throw ConfigError("config: integrator.method must be rk45 or rk4");
    cfg.integrator.rtol = get_or<double>(i, "rtol", cfg.integrator.rtol);
    cfg.integrator.atol = get_or<double>(i, "atol", cfg.integrator.atol);
    cfg.integrator.fixed_step = get_or<double>(i, "fixed_step", cfg.integrator.fixed_step);
  }
  if (j.contains("thresholds")) {
    for (const auto& [key, value] : j.at("thresholds").items()) {
      if (!value.is_number())
        throw ConfigError("config: thresholds must map identity refs to numbers");
      cfg.thresholds[key] = value.get<double>();
    }
  }
  if (cfg.samples <= 0) throw ConfigError("config: samples must be positive");
  if (!(cfg.integrator.rtol > 0.0) || !(cfg.integrator.atol > 0.0))
    throw ConfigError("config: integrator tolerances must be positive");
  if (cfg.scenario.box_halfwidth && !(*cfg.scenario.box_halfwidth > 0.0))
    throw ConfigError("config: scenario.box_halfwidth must be positive");
  return cfg;
}

RunConfig parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot read '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str());
}

}  // namespace contactflow
