#include "costeval/manifest.hpp"

#include <array>
#include <set>

#include "costeval/errors.hpp"
#include "costeval/json_util.hpp"

namespace costeval {

using nlohmann::ordered_json;

namespace {

constexpr std::array<const char*, 4> kGeneralityNames = {
    "distribution_specific", "task_specific", "domain_general", "fully_general"};
constexpr std::array<const char*, 5> kHoldoutNames = {
    "none", "in_distribution_samples", "out_of_distribution_samples", "tasks", "domains"};
constexpr std::array<const char*, 5> kHoldoutWords = {
    "no holdout", "in-distribution samples", "out-of-distribution samples", "tasks",
    "domains"};

}  // namespace

std::string to_string(Generality g) { return kGeneralityNames.at(static_cast<std::size_t>(g)); }
std::string to_string(Holdout h) { return kHoldoutNames.at(static_cast<std::size_t>(h)); }
std::string describe(Holdout h) { return kHoldoutWords.at(static_cast<std::size_t>(h)); }

Generality parse_generality(const std::string& text) {
  for (std::size_t i = 0; i < kGeneralityNames.size(); ++i) {
    if (text == kGeneralityNames[i]) return static_cast<Generality>(i);
  }
  throw SchemaError(0, "unknown generality \"" + text + "\"");
}

Holdout parse_holdout(const std::string& text) {
  for (std::size_t i = 0; i < kHoldoutNames.size(); ++i) {
    if (text == kHoldoutNames[i]) return static_cast<Holdout>(i);
  }
  throw SchemaError(0, "unknown holdout \"" + text + "\"");
}

void BenchmarkManifest::validate() const {
  if (benchmark_id.empty()) throw ConfigError("manifest needs a benchmark_id");
  if (tasks.empty()) throw ConfigError("manifest has no tasks");
  std::set<std::string> seen;
  for (const auto& t : tasks) {
    try {
      t.validate();
    } catch (const InvalidArgument& e) {
      throw ConfigError(e.what());
    }
    if (!seen.insert(t.task_id).second) throw ConfigError("task id repeated: " + t.task_id);
  }
}

std::vector<std::string> BenchmarkManifest::task_ids() const {
  std::vector<std::string> ids;
  for (const auto& t : tasks) ids.push_back(t.task_id);
  return ids;
}

ordered_json BenchmarkManifest::to_json() const {
  ordered_json j;
  j["benchmark_id"] = benchmark_id;
  j["generality"] = to_string(generality);
  j["holdout"] = to_string(holdout);
  if (intent_note) j["intent_note"] = *intent_note;
  j["tasks"] = ordered_json::array();
  for (const auto& t : tasks) {
    j["tasks"].push_back(
        {{"id", t.task_id}, {"difficulty", t.difficulty}, {"prompt_tokens", t.prompt_tokens}});
  }
  return j;
}

BenchmarkManifest BenchmarkManifest::from_json(const ordered_json& doc) {
  using namespace json_util;
  if (!doc.is_object()) throw SchemaError(0, "manifest must be an object");
  BenchmarkManifest m;
  m.benchmark_id = require_string(doc, "benchmark_id");
  m.generality = parse_generality(require_string(doc, "generality"));
  m.holdout = parse_holdout(require_string(doc, "holdout"));
  if (doc.contains("intent_note") && !doc["intent_note"].is_null()) {
    m.intent_note = require_string(doc, "intent_note");
  }
  const auto& tasks = require(doc, "tasks");
  if (!tasks.is_array()) throw SchemaError(0, "\"tasks\" must be an array");
  for (const auto& t : tasks) {
    sim::SimTaskSpec spec;
    spec.task_id = require_string(t, "id");
    spec.difficulty = t.contains("difficulty") ? require_number(t, "difficulty") : 0.0;
    spec.prompt_tokens = t.contains("prompt_tokens") ? require_uint(t, "prompt_tokens") : 0;
    m.tasks.push_back(std::move(spec));
  }
  m.validate();
  return m;
}

BenchmarkManifest BenchmarkManifest::load(const std::string& path) {
  return from_json(json_util::parse_strict(json_util::read_file(path)));
}

std::string to_string(LintVerdict v) {
  switch (v) {
    case LintVerdict::pass: return "PASS";
    case LintVerdict::warn: return "WARN";
    case LintVerdict::fail: return "FAIL";
  }
  return "FAIL";
}

Holdout required_holdout(Generality g) {
  switch (g) {
    case Generality::distribution_specific: return Holdout::in_distribution_samples;
    case Generality::task_specific: return Holdout::out_of_distribution_samples;
    case Generality::domain_general: return Holdout::tasks;
    case Generality::fully_general: return Holdout::domains;
  }
  return Holdout::domains;
}

LintReport lint(Generality generality, Holdout holdout, bool has_intent) {
  LintReport r;
  r.generality = generality;
  r.declared = holdout;
  r.required = required_holdout(generality);
  const std::string need = to_string(generality) + " benchmarks need a holdout of " +
                           describe(r.required);
  if (holdout >= r.required) {
    r.verdict = LintVerdict::pass;
    r.message = "holdout of " + describe(holdout) + " satisfies " + need;
  } else if (has_intent) {
    r.verdict = LintVerdict::warn;
    r.message = need + "; declared " + describe(holdout) + ", intent noted";
  } else {
    r.verdict = LintVerdict::fail;
    r.message = need + "; declared " + describe(holdout);
  }
  return r;
}

LintReport lint_manifest(const BenchmarkManifest& manifest) {
  const bool intent = manifest.intent_note && !manifest.intent_note->empty();
  return lint(manifest.generality, manifest.holdout, intent);
}

ordered_json to_json(const LintReport& report) {
  return {{"verdict", to_string(report.verdict)},
          {"generality", to_string(report.generality)},
          {"declared", to_string(report.declared)},
          {"required", to_string(report.required)},
          {"message", report.message}};
}

}  // namespace costeval
