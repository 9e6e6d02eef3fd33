#include "contactflow/report.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>

namespace contactflow {

using nlohmann::json;

namespace {

json identity_to_json(const IdentityResult& id) {
  json j;
  j["ref"] = id.ref;
  j["quote"] = id.quote;
  j["threshold"] = id.threshold;
  j["max_residual"] = id.max_residual ? json(*id.max_residual) : json();
  j["mean_residual"] = id.mean_residual ? json(*id.mean_residual) : json();
  j["pass"] = id.pass;
  j["coverage"] = {{"samples", id.samples},
                   {"evaluated", id.evaluated},
                   {"domain_failures", id.domain_failures},
                   {"skipped", id.skipped}};
  j["note"] = id.note;
  return j;
}

}  // namespace

std::string RunReport::to_json_string() const {
  json j;
  j["scenario"] = scenario;
  j["seed"] = seed;
  j["pass"] = pass;
  j["suites"] = json::array();
  for (const auto& suite : suites) {
    json s;
    s["name"] = suite.name;
    s["pass"] = suite.pass;
    s["identities"] = json::array();
    for (const auto& id : suite.identities) s["identities"].push_back(identity_to_json(id));
    j["suites"].push_back(std::move(s));
  }
  return j.dump(2) + "\n";
}

IdentityAccumulator::IdentityAccumulator(std::string ref, std::string quote, double threshold) {
  r_.ref = std::move(ref);
  r_.quote = std::move(quote);
  r_.threshold = threshold;
}

void IdentityAccumulator::add(double residual) {
  ++r_.samples;
  ++r_.evaluated;
  sum_ += std::abs(residual);
  const double a = std::abs(residual);
  r_.max_residual = r_.max_residual ? std::max(*r_.max_residual, a) : a;
}

void IdentityAccumulator::domain_failure() {
  ++r_.samples;
  ++r_.domain_failures;
}

void IdentityAccumulator::skip_sample() {
  ++r_.samples;
  ++r_.skipped;
}

void IdentityAccumulator::skip_all(const std::string& why) {
  r_.note = r_.note.empty() ? why : r_.note + "; " + why;
}

void IdentityAccumulator::set_note(const std::string& note) {
  r_.note = r_.note.empty() ? note : r_.note + "; " + note;
}

void IdentityAccumulator::force_fail(const std::string& why) {
  forced_fail_ = true;
  set_note(why);
}

IdentityResult IdentityAccumulator::finish() const {
  IdentityResult out = r_;
  if (out.evaluated > 0) {
    out.mean_residual = sum_ / out.evaluated;
    out.pass = *out.max_residual <= out.threshold;
  } else {
    // Nothing evaluated: not certifiable, but domain failures and skips are
    // coverage facts, not identity failures.
    out.pass = true;
    if (out.note.empty()) out.note = "no coverage";
  }
  if (forced_fail_) out.pass = false;
  return out;
}

}  // namespace contactflow
