#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "costeval/ledger.hpp"
#include "costeval/provider.hpp"

namespace costeval::strategies {

enum class VerifierKind { example_tests, hidden_tests };

/// Deterministic pass/fail check of a candidate. Example tests are visible to
/// strategies; hidden tests only score the final answer.
class Verifier {
 public:
  virtual ~Verifier() = default;
  virtual VerifierKind kind() const = 0;
  virtual bool check(const std::string& task_id, const std::string& candidate) const = 0;
};

/// Reads the markers written by the simulated provider.
class SimVerifier final : public Verifier {
 public:
  explicit SimVerifier(VerifierKind kind) : kind_(kind) {}
  VerifierKind kind() const override { return kind_; }
  bool check(const std::string& task_id, const std::string& candidate) const override;

 private:
  VerifierKind kind_;
};

struct Verifiers {
  const Verifier& example;
  const Verifier& hidden;
};

struct ZeroShot {
  std::string model;
};

struct Retry {
  std::string model;
  std::uint32_t max_attempts = 5;
  double temperature = 0.0;
};

struct Warming {
  std::string model;
  std::vector<double> schedule = {0.0, 0.3, 0.3, 0.5, 0.5};
};

struct Escalation {
  std::vector<std::string> chain;
};

using StrategySpec = std::variant<ZeroShot, Retry, Warming, Escalation>;

/// Canonical ledger key, e.g. "retry:gpt-4:k5:t0".
std::string strategy_id(const StrategySpec& spec);

/// Structural checks (attempts >= 1, non-empty schedule, duplicate-free chain,
/// temperatures in [0, 2]). Throws ConfigError.
void validate(const StrategySpec& spec);

/// Throws UnknownModel listing every model the predicate rejects.
void validate_models(const StrategySpec& spec,
                     const std::function<bool(const std::string&)>& known);

std::vector<std::string> models_of(const StrategySpec& spec);

StrategySpec strategy_from_json(const nlohmann::ordered_json& doc);
nlohmann::ordered_json to_json(const StrategySpec& spec);

struct TaskInput {
  std::string task_id;
  std::string prompt;
  std::uint64_t run_seed = 0;
  std::uint32_t max_output_tokens = 1024;
};

/// One call at temperature 0; success is the hidden verdict.
TaskResult run_zero_shot(const TaskInput& task, const ZeroShot& spec,
                         Provider& provider, const Verifiers& verifiers);

/// Same prompt and temperature each attempt; stops at the first candidate
/// passing the example tests, else scores the last one.
TaskResult run_retry(const TaskInput& task, const Retry& spec, Provider& provider,
                     const Verifiers& verifiers);

/// As retry, attempt i at schedule[i].
TaskResult run_warming(const TaskInput& task, const Warming& spec,
                       Provider& provider, const Verifiers& verifiers);

/// One temperature-0 attempt per chain model, cheapest first.
TaskResult run_escalation(const TaskInput& task, const Escalation& spec,
                          Provider& provider, const Verifiers& verifiers);

TaskResult run_strategy(const TaskInput& task, const StrategySpec& spec,
                        Provider& provider, const Verifiers& verifiers);

/// "rate_limited", "transport_error", ... for provider exceptions.
std::string error_code(const std::exception& e);

}  // namespace costeval::strategies
