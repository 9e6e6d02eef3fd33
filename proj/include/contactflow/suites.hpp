#pragma once

#include "contactflow/config.hpp"
#include "contactflow/report.hpp"
#include "contactflow/scenarios.hpp"

#include <random>

namespace contactflow {

/// Deterministic sampling: mt19937_64 plus an explicit bits-to-double map,
/// so identical seeds give identical points on every platform.
class SampleRng {
 public:
  explicit SampleRng(std::uint64_t seed) : gen_(seed) {}

  double unit() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * unit(); }

  Vector point_in(const Box& box) {
    Vector x(box.dim());
    for (int i = 0; i < box.dim(); ++i) x[i] = uniform(box.lo[i], box.hi[i]);
    return x;
  }

 private:
  std::mt19937_64 gen_;
};

const std::vector<std::string>& suite_names();
bool suite_known(const std::string& suite);

/// Declared identity checklist of a suite; the emitted report carries
/// exactly these refs, in this order, independent of the scenario.
std::vector<std::string> suite_checklist(const std::string& suite);

SuiteResult run_suite(const std::string& suite, const RunConfig& cfg);

/// Run every configured suite; throws ConfigError for unknown suites or a
/// scenario/suite mismatch.
RunReport run_report(const RunConfig& cfg);

}  // namespace contactflow
