// Batch front end: load a scenario config, run verification suites, emit a
// JSON report and optional trajectory CSVs. Exit codes: 0 all suites pass,
// 2 identity failure, 3 configuration error.

#include "contactflow/suites.hpp"
#include "contactflow/zeroset.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

namespace fs = std::filesystem;
using namespace contactflow;

namespace {

constexpr int kExitPass = 0;
constexpr int kExitIdentityFailure = 2;
constexpr int kExitConfigError = 3;

Vector parse_x0(const std::string& csv, int expected_dim) {
  std::vector<double> values;
  std::stringstream ss(csv);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      values.push_back(std::stod(item));
    } catch (const std::exception&) {
      throw ConfigError("trajectory: cannot parse x0 component '" + item + "'");
    }
  }
  if (static_cast<int>(values.size()) != expected_dim)
    throw ConfigError("trajectory: x0 has " + std::to_string(values.size()) +
                      " components, chart needs " + std::to_string(expected_dim));
  Vector x(expected_dim);
  for (int i = 0; i < expected_dim; ++i) x[i] = values[i];
  return x;
}

void write_cli_trajectory(const FlowOutcome& outcome, const ConservationReport* probe,
                          std::ostream& os) {
  const int d = outcome.samples.empty() ? 0 : static_cast<int>(outcome.samples[0].second.size());
  os << "t";
  for (int i = 0; i < d; ++i) os << ",x" << i;
  os << ",status\n";
  char buf[32];
  auto put = [&](double v) {
    std::snprintf(buf, sizeof buf, "%.17g", v);
    os << buf;
  };
  for (size_t k = 0; k < outcome.samples.size(); ++k) {
    put(outcome.samples[k].first);
    for (int i = 0; i < d; ++i) {
      os << ",";
      put(outcome.samples[k].second[i]);
    }
    os << "," << (k + 1 == outcome.samples.size() ? to_string(outcome.status) : "ok") << "\n";
  }
  // Trailer: conservation-probe residuals for the integrated orbit.
  os << "probe";
  if (probe) {
    os << ",";
    put(probe->max_rate_residual);
    if (probe->first_integral_drift) {
      os << ",";
      put(*probe->first_integral_drift);
    } else {
      os << ",na";
    }
    for (int i = 2; i < d; ++i) os << ",";
    os << "," << to_string(probe->status) << "\n";
  } else {
    for (int i = 0; i < d; ++i) os << ",na";
    os << ",na\n";
  }
}

int cmd_run(const std::string& config_path, const std::string& out_dir,
            std::optional<std::uint64_t> seed_override) {
  RunConfig cfg = parse_config_file(config_path);
  if (seed_override) cfg.seed = *seed_override;
  const RunReport report = run_report(cfg);

  fs::create_directories(out_dir);
  const fs::path report_path = fs::path(out_dir) / cfg.report_name;
  std::ofstream out(report_path, std::ios::binary);
  if (!out) throw ConfigError("cannot write report to " + report_path.string());
  out << report.to_json_string();
  out.close();

  int identities = 0, failures = 0;
  for (const auto& suite : report.suites)
    for (const auto& id : suite.identities) {
      ++identities;
      if (!id.pass) ++failures;
    }
  std::cout << "report: " << report_path.string() << "\n";
  std::cout << "scenario: " << report.scenario << "\n";
  for (const auto& suite : report.suites)
    std::cout << "suite " << suite.name << ": " << (suite.pass ? "pass" : "FAIL") << "\n";
  std::cout << identities << " identities, " << failures << " failing\n";
  return report.pass ? kExitPass : kExitIdentityFailure;
}

int cmd_trajectory(const std::string& config_path, const std::string& out_dir,
                   const std::string& x0_csv, double t_final) {
  const RunConfig cfg = parse_config_file(config_path);
  fs::create_directories(out_dir);
  const fs::path csv_path = fs::path(out_dir) / "trajectory.csv";
  std::ofstream out(csv_path, std::ios::binary);
  if (!out) throw ConfigError("cannot write trajectory to " + csv_path.string());

  if (cfg.scenario.name == "dissipative") {
    DissipativeScenario sc;
    try {
      sc = dissipative_scenario(cfg.scenario.gamma, cfg.scenario.potential,
                                cfg.scenario.box_halfwidth.value_or(20.0));
    } catch (const std::invalid_argument& e) {
      throw ConfigError(std::string("scenario precondition violated: ") + e.what());
    }
    const Vector x0 = parse_x0(x0_csv, sc.system.dim());
    const FlowOptions opts = cfg.integrator.with_box(sc.system.chart.box);
    const FlowOutcome outcome = integrate(sc.x_h, x0, t_final, opts);
    ConservationReport probe;
    if (outcome.complete() && t_final != 0.0)
      probe = conservation_probe(sc.system, x0, t_final, opts);
    write_cli_trajectory(outcome, &probe, out);
  } else if (cfg.scenario.name == "cotangent-sampler") {
    const SamplerScenario sc = cotangent_sampler(cfg.scenario.metric, cfg.scenario.dof);
    const Vector x0 = parse_x0(x0_csv, sc.chart.dim());
    const FlowOptions opts = cfg.integrator.with_box(sc.chart.box.inflated(3.0));
    const FlowOutcome outcome = integrate(sc.dilation, x0, t_final, opts);
    write_cli_trajectory(outcome, nullptr, out);
  } else {
    throw ConfigError("unknown scenario '" + cfg.scenario.name + "'");
  }
  std::cout << "trajectory: " << csv_path.string() << "\n";
  return kExitPass;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"contactflow: chart-based contact Hamiltonian dynamics and invariant-measure "
               "verification"};
  app.require_subcommand(1);

  std::string config_path, out_dir = ".", x0_csv;
  double t_final = 1.0;
  std::optional<std::uint64_t> seed_override;
  std::uint64_t seed_raw = 0;

  CLI::App* run = app.add_subcommand("run", "run verification suites from a config");
  run->add_option("config", config_path, "config JSON")->required();
  run->add_option("--out", out_dir, "output directory");
  CLI::Option* seed_opt = run->add_option("--seed", seed_raw, "override the config seed");

  CLI::App* traj = app.add_subcommand("trajectory", "integrate one orbit to CSV");
  traj->add_option("config", config_path, "config JSON")->required();
  traj->add_option("--x0", x0_csv, "initial point, comma-separated chart coordinates")
      ->required();
  traj->add_option("--t", t_final, "integration time")->required();
  traj->add_option("--out", out_dir, "output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) ? kExitConfigError : kExitPass;
  }

  try {
    if (run->parsed()) {
      if (seed_opt->count() > 0) seed_override = seed_raw;
      return cmd_run(config_path, out_dir, seed_override);
    }
    return cmd_trajectory(config_path, out_dir, x0_csv, t_final);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
