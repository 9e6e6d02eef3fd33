#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace contactflow {

/**
 * One verified identity inside a suite. `ref` is the stable machine name,
 * `quote` the mathematical statement being checked. Samples that could not
 * be evaluated because a flow left its domain (or a construction
 * precondition failed at that sample) count as domain failures - coverage
 * information, never identity failures.
 */
struct IdentityResult {
  std::string ref;
  std::string quote;
  double threshold = 0.0;
  std::optional<double> max_residual;   // absent when nothing was evaluated
  std::optional<double> mean_residual;
  int samples = 0;          // attempted
  int evaluated = 0;        // produced a residual
  int domain_failures = 0;  // samples == evaluated + domain_failures + skipped
  int skipped = 0;
  bool pass = true;
  std::string note;
};

struct SuiteResult {
  std::string name;
  std::vector<IdentityResult> identities;
  bool pass = true;
};

struct RunReport {
  std::string scenario;
  std::uint64_t seed = 0;
  std::vector<SuiteResult> suites;
  bool pass = true;

  /// Canonical serialization; identical configurations and seeds produce
  /// byte-identical output.
  std::string to_json_string() const;
};

/// Collects per-sample residuals for one identity.
class IdentityAccumulator {
 public:
  IdentityAccumulator(std::string ref, std::string quote, double threshold);

  void add(double residual);
  void domain_failure();
  void skip_sample();
  void skip_all(const std::string& why);  // identity not applicable
  void set_note(const std::string& note);
  void force_fail(const std::string& why);

  IdentityResult finish() const;

 private:
  IdentityResult r_;
  double sum_ = 0.0;
  bool forced_fail_ = false;
};

}  // namespace contactflow
