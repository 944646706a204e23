#pragma once

#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "costeval/sim_provider.hpp"

namespace costeval {

enum class Generality { distribution_specific, task_specific, domain_general, fully_general };

/// Ordered from weakest to strongest; a stronger holdout satisfies any weaker
/// requirement.
enum class Holdout { none, in_distribution_samples, out_of_distribution_samples, tasks, domains };

std::string to_string(Generality g);
std::string to_string(Holdout h);
/// Human wording, e.g. "out-of-distribution samples".
std::string describe(Holdout h);
Generality parse_generality(const std::string& text);  // throws SchemaError
Holdout parse_holdout(const std::string& text);        // throws SchemaError

struct BenchmarkManifest {
  std::string benchmark_id;
  std::vector<sim::SimTaskSpec> tasks;
  Generality generality = Generality::task_specific;
  Holdout holdout = Holdout::none;
  std::optional<std::string> intent_note;

  /// Non-empty id and task list, unique task ids. Throws ConfigError.
  void validate() const;
  std::vector<std::string> task_ids() const;

  nlohmann::ordered_json to_json() const;
  static BenchmarkManifest from_json(const nlohmann::ordered_json& doc);
  static BenchmarkManifest load(const std::string& path);
};

enum class LintVerdict { pass, warn, fail };

std::string to_string(LintVerdict v);

struct LintReport {
  LintVerdict verdict = LintVerdict::pass;
  Generality generality = Generality::task_specific;
  Holdout declared = Holdout::none;
  Holdout required = Holdout::none;
  std::string message;
};

Holdout required_holdout(Generality g);

/// PASS when the declared holdout is at least the required one. Otherwise FAIL
/// naming the required holdout, downgraded to WARN when the manifest states an
/// intent to build it.
LintReport lint_manifest(const BenchmarkManifest& manifest);
LintReport lint(Generality generality, Holdout holdout, bool has_intent);

nlohmann::ordered_json to_json(const LintReport& report);

}  // namespace costeval
