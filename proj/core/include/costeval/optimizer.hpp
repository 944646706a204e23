#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "costeval/ledger.hpp"
#include "costeval/pricing.hpp"
#include "costeval/provider.hpp"

namespace costeval::optimizer {

inline constexpr const char* kBootstrapRunId = "optimize:bootstrap";
inline constexpr const char* kTrialRunId = "optimize:trial";
inline constexpr const char* kSelectRunId = "optimize:select";

struct Sample {
  std::string id;
  std::string input;
  std::string ground_truth;
};

struct Prediction {
  std::string output;
  std::string trace;
};

struct Demo {
  std::string sample_id;
  std::string input;
  std::string trace;
  std::string output;
  std::uint64_t token_count = 0;

  /// Text prepended to prompts; token_count is count_tokens of this.
  std::string serialize() const;

  friend bool operator==(const Demo&, const Demo&) = default;
};

/// Captured successful runs over the training split.
struct DemoPool {
  std::vector<Demo> demos;

  std::vector<std::string> provenance() const;
  std::size_t size() const { return demos.size(); }
};

struct SearchSpace {
  std::vector<double> temperatures = {0.0, 0.2, 0.4, 0.6};
  std::size_t max_demos = 8;
};

struct AgentConfig {
  std::vector<double> module_temperatures;
  std::vector<std::size_t> demo_indices;
  bool include_formatting = false;

  /// Throws InvalidArgument when a temperature is outside the space, too many
  /// demos are selected, or an index is out of range or repeated.
  void validate(const SearchSpace& space, std::size_t pool_size) const;

  friend bool operator==(const AgentConfig&, const AgentConfig&) = default;
};

nlohmann::ordered_json to_json(const AgentConfig& config);

struct TrialResult {
  AgentConfig config;
  double val_accuracy = 0.0;
  std::uint64_t prompt_tokens = 0;
  std::uint32_t trial_index = 0;

  friend bool operator==(const TrialResult&, const TrialResult&) = default;
};

nlohmann::ordered_json to_json(const TrialResult& trial);

/// Sum of the selected demos' token counts plus the formatting block.
std::uint64_t prompt_tokens(const AgentConfig& config, const DemoPool& pool,
                            std::uint64_t formatting_tokens);

/// Per-benchmark acceptance check. Must be deterministic.
class TaskMetric {
 public:
  virtual ~TaskMetric() = default;
  virtual bool accept(const Prediction& prediction, const std::string& ground_truth) const = 0;
};

class ExactMatch final : public TaskMetric {
 public:
  bool accept(const Prediction& prediction, const std::string& ground_truth) const override {
    return prediction.output == ground_truth;
  }
};

/// Accepts nothing; handy for degenerate bootstraps.
class RejectAll final : public TaskMetric {
 public:
  bool accept(const Prediction&, const std::string&) const override { return false; }
};

/// Outcome of one agent execution on one sample.
struct AgentOutcome {
  Prediction prediction;
  std::vector<CallRecord> calls;
  /// Provider error code that cut the run short, if any.
  std::string error;
};

/// The program being optimized: a fixed number of modules, each issuing one
/// model call per sample.
class Agent {
 public:
  virtual ~Agent() = default;
  virtual std::size_t module_count() const = 0;
  /// Text of the formatting-instruction block (may be empty).
  virtual const std::string& formatting_text() const = 0;
  virtual AgentOutcome run(const Sample& sample, const AgentConfig& config,
                           const DemoPool& pool, std::uint64_t run_seed,
                           Provider& provider) const = 0;
};

/// Multi-module pipeline over the simulated provider. Module m calls
/// module_models[m] at the configured temperature with a prompt made of the
/// formatting block, the selected demos and the sample input. The answer is
/// correct when the last module's candidate passes the hidden tests, or when
/// an extra draw falls below demo_gain * k + formatting_gain (k demos).
class SimPipelineAgent final : public Agent {
 public:
  struct Options {
    std::vector<std::string> module_models;
    std::string formatting_text =
        "Answer with the final result only, on a single line, without commentary.";
    double demo_gain = 0.04;
    double formatting_gain = 0.05;
    std::uint32_t max_output_tokens = 1024;
  };

  explicit SimPipelineAgent(Options options);

  std::size_t module_count() const override { return options_.module_models.size(); }
  const std::string& formatting_text() const override { return options_.formatting_text; }
  AgentOutcome run(const Sample& sample, const AgentConfig& config, const DemoPool& pool,
                   std::uint64_t run_seed, Provider& provider) const override;

  const Options& options() const { return options_; }

  static std::string build_prompt(const std::string& formatting, const AgentConfig& config,
                                  const DemoPool& pool, const Sample& sample,
                                  std::size_t module_index);

 private:
  Options options_;
};

/// Temperatures all zero, no demos, no formatting.
AgentConfig baseline_config(std::size_t module_count);

struct BootstrapResult {
  DemoPool pool;
  RunRecord run;
};

/// Runs the agent with the baseline configuration over every training sample
/// and keeps each metric-passing run as a demo. Samples whose run hit a
/// provider error are skipped and annotated in the run record. Throws
/// InvalidArgument on an empty split.
BootstrapResult bootstrap_demos(const std::vector<Sample>& train, const Agent& agent,
                                const TaskMetric& metric, Provider& provider,
                                std::uint64_t seed, unsigned parallelism = 1);

/// Draws trial configurations.
class ConfigSampler {
 public:
  virtual ~ConfigSampler() = default;
  virtual AgentConfig sample(std::uint32_t trial_index, std::size_t module_count,
                             std::size_t pool_size, const SearchSpace& space) const = 0;
};

/// Independent uniform draws per trial: one temperature per module, a demo
/// count k in [0, min(max_demos, pool)], a uniform k-subset, and a fair coin
/// for the formatting block.
class RandomSampler final : public ConfigSampler {
 public:
  explicit RandomSampler(std::uint64_t seed) : seed_(seed) {}
  AgentConfig sample(std::uint32_t trial_index, std::size_t module_count,
                     std::size_t pool_size, const SearchSpace& space) const override;

 private:
  std::uint64_t seed_;
};

struct OptimizeOptions {
  std::uint32_t n_trials = 16;
  std::uint64_t seed = 0;
  SearchSpace space;
  /// False filters on accuracy alone.
  bool token_objective = true;
  unsigned parallelism = 1;
};

struct OptimizeResult {
  /// Every evaluated trial, by trial index.
  std::vector<TrialResult> trials;
  /// Non-dominated subset, ordered by prompt tokens then trial index.
  std::vector<TrialResult> pareto;
  /// One run record per trial (strategy id kTrialRunId).
  std::vector<RunRecord> runs;
};

/// Pairwise filter under (max accuracy, min prompt tokens). Trials equal in
/// both objectives are all kept.
std::vector<TrialResult> non_dominated_trials(const std::vector<TrialResult>& trials,
                                              bool token_objective = true);

/// Samples n_trials configurations, evaluates each with one pass over the
/// validation split and returns the non-dominated set. A sampler may be
/// supplied; the default is RandomSampler(options.seed). Throws
/// InvalidArgument when n_trials is zero or the split is empty.
OptimizeResult joint_optimize(const DemoPool& pool, const std::vector<Sample>& val,
                              const Agent& agent, const TaskMetric& metric,
                              Provider& provider, const OptimizeOptions& options,
                              const ConfigSampler* sampler = nullptr);

/// Provider calls joint_optimize makes when no call fails.
std::uint64_t predicted_search_calls(const Agent& agent, std::uint32_t n_trials,
                                     std::size_t val_size);

struct Candidate {
  TrialResult trial;
  double dev_accuracy = 0.0;
};

/// Highest dev accuracy; ties go to fewer prompt tokens, then lower trial
/// index. Throws EmptyInput.
const Candidate& choose_deployment(const std::vector<Candidate>& candidates);

struct Selection {
  std::vector<Candidate> candidates;
  TrialResult chosen;
  /// One run per candidate (strategy id kSelectRunId, run index = position).
  std::vector<RunRecord> runs;
};

/// Re-evaluates every candidate on the dev split and applies
/// choose_deployment. Throws EmptyInput on an empty set.
Selection select_deployment(const std::vector<TrialResult>& pareto_set,
                            const std::vector<Sample>& dev, const DemoPool& pool,
                            const Agent& agent, const TaskMetric& metric,
                            Provider& provider, std::uint64_t seed,
                            unsigned parallelism = 1);

/// fixed = every call in the optimization ledger; variable_per_task = mean
/// per-task cost over the deployment ledger. Exact sums, rounded once.
CostBreakdown config_cost_breakdown(const EvalLedger& optimization,
                                    const EvalLedger& deployment, const PriceSheet& sheet);

/// End-to-end: bootstrap on train, search on val, select on dev. All run
/// records land in `ledger`.
struct OptimizationReport {
  DemoPool pool;
  OptimizeResult search;
  Selection selection;
  EvalLedger ledger;
};

OptimizationReport optimize(const std::vector<Sample>& train, const std::vector<Sample>& val,
                            const std::vector<Sample>& dev, const Agent& agent,
                            const TaskMetric& metric, Provider& provider,
                            const OptimizeOptions& options,
                            const std::string& benchmark_id = "optimize");

nlohmann::ordered_json to_json(const OptimizationReport& report);

}  // namespace costeval::optimizer
