#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "costeval/http_provider.hpp"
#include "costeval/manifest.hpp"
#include "costeval/optimizer.hpp"
#include "costeval/pricing.hpp"
#include "costeval/sim_provider.hpp"
#include "costeval/strategies.hpp"

namespace costeval {

enum class TaskOrderPolicy { given, shuffled_per_run };

struct ProviderConfig {
  enum class Kind { sim, http };
  Kind kind = Kind::sim;
  std::vector<sim::SimModelSpec> sim_models;
  std::map<std::string, sim::RateLimit> rate_limits;
  EndpointConfig endpoint;

  nlohmann::ordered_json to_json() const;
  static ProviderConfig from_json(const nlohmann::ordered_json& doc,
                                  const std::string& base_dir);
};

struct OptimizerConfig {
  std::uint32_t n_trials = 16;
  std::vector<double> temperatures = {0.0, 0.2, 0.4, 0.6};
  std::size_t max_demos = 8;
  std::size_t train_size = 50;
  std::size_t val_size = 50;
  std::size_t dev_size = 0;
  std::uint64_t seed = 0;
  bool token_objective = true;
  optimizer::SimPipelineAgent::Options agent;

  nlohmann::ordered_json to_json() const;
  static OptimizerConfig from_json(const nlohmann::ordered_json& doc);
};

/// Resolved evaluation configuration: file references are loaded.
struct EvalConfig {
  BenchmarkManifest manifest;
  std::vector<strategies::StrategySpec> strategies;
  std::uint32_t repetitions = 5;
  std::uint64_t base_seed = 0;
  PriceSheet price_sheet;
  ProviderConfig provider;
  TaskOrderPolicy task_order_policy = TaskOrderPolicy::given;
  unsigned parallelism = 1;
  std::uint32_t max_output_tokens = 1024;
  std::optional<OptimizerConfig> optimizer;

  /// Repetitions >= 1, strategies valid with unique ids, every strategy model
  /// priced and known to the provider. Throws ConfigError.
  void validate() const;

  nlohmann::ordered_json to_json() const;
  /// `base_dir` resolves relative "manifest", "price_sheet" and endpoint
  /// paths. Throws ConfigError or SchemaError.
  static EvalConfig from_json(const nlohmann::ordered_json& doc,
                              const std::string& base_dir = ".");
  static EvalConfig load(const std::string& path);
};

std::string to_string(TaskOrderPolicy p);

/// A fresh provider per call, so every run starts with full rate-limit
/// buckets.
std::unique_ptr<Provider> make_provider(const ProviderConfig& config,
                                        const BenchmarkManifest& manifest);

}  // namespace costeval
