#pragma once

#include <chrono>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "costeval/provider.hpp"
#include "costeval/random.hpp"

namespace costeval::sim {

/// Example-test pass probability gained per unit of temperature.
inline constexpr double kTemperatureBonus = 0.1;
/// Temperatures are quantized to this step inside draw keys.
inline constexpr double kTemperatureQuantum = 0.05;
/// Scale of the "hidden pass without example pass" residual.
inline constexpr double kResidualFactor = 0.1;

/// Stream indices inside one draw key.
inline constexpr std::uint32_t kExampleStream = 0;
inline constexpr std::uint32_t kHiddenStream = 1;
inline constexpr std::uint32_t kResidualStream = 2;
inline constexpr std::uint32_t kOutputTokenStream = 3;

struct SimModelSpec {
  std::string model;
  double skill = 0.5;
  double example_pass_bonus = 0.0;
  double hidden_gap = 0.0;
  std::uint64_t prompt_overhead_tokens = 0;
  std::uint64_t output_tokens_mean = 100;
  double latency_ms_per_output_token = 0.0;

  /// Throws InvalidArgument on out-of-range fields.
  void validate() const;
};

struct SimTaskSpec {
  std::string task_id;
  double difficulty = 0.5;
  std::uint64_t prompt_tokens = 0;

  void validate() const;
};

struct SuccessDraws {
  bool example_pass = false;
  bool hidden_pass = false;

  friend bool operator==(const SuccessDraws&, const SuccessDraws&) = default;
};

struct SuccessProbabilities {
  double base = 0.0;
  double example = 0.0;
  double hidden_given_example = 0.0;
  double residual = 0.0;
};

SuccessProbabilities success_probabilities(const SimModelSpec& model,
                                           const SimTaskSpec& task,
                                           double temperature);

std::int64_t quantize_temperature(double temperature);

/// Key of every draw for one (seed material, model, task, temperature).
random::Hash128 draw_key(const SeedMaterial& seed, const std::string& model,
                         const std::string& task_id, double temperature);

/// example_pass = u0 < p_example;
/// hidden_pass = (example_pass && u1 < 1 - hidden_gap) || u2 < residual.
SuccessDraws sim_success_draws(const SimModelSpec& model, const SimTaskSpec& task,
                               double temperature, const SeedMaterial& seed);

/// Prompt text of exactly `prompt_tokens` heuristic tokens.
std::string make_task_prompt(const SimTaskSpec& task);

/// Marker-encoded candidate text; verifiers read the markers back.
std::string encode_candidate(const std::string& model, const std::string& task_id,
                             std::uint32_t attempt, const SuccessDraws& draws);
std::optional<SuccessDraws> decode_candidate(const std::string& text);

class Clock {
 public:
  virtual ~Clock() = default;
  virtual std::chrono::steady_clock::time_point now() const = 0;
};

class SteadyClock final : public Clock {
 public:
  std::chrono::steady_clock::time_point now() const override {
    return std::chrono::steady_clock::now();
  }
};

/// Clock that only moves when told to.
class ManualClock final : public Clock {
 public:
  std::chrono::steady_clock::time_point now() const override;
  void advance(std::chrono::milliseconds by);

 private:
  mutable std::mutex mutex_;
  std::chrono::steady_clock::time_point now_{};
};

struct RateLimit {
  double capacity = 1.0;
  double refill_per_minute = 1.0;
};

/// Internally synchronized token bucket.
class TokenBucket {
 public:
  TokenBucket(RateLimit limit, std::shared_ptr<const Clock> clock);

  /// Takes a token or returns the wait until one is available.
  std::optional<std::chrono::milliseconds> try_acquire();

 private:
  RateLimit limit_;
  std::shared_ptr<const Clock> clock_;
  std::mutex mutex_;
  double tokens_;
  std::chrono::steady_clock::time_point last_;
};

/// Deterministic stand-in for a model API. Stateless except for the
/// optional per-model token buckets.
class SimulatedProvider final : public Provider {
 public:
  SimulatedProvider(std::vector<SimModelSpec> models, std::vector<SimTaskSpec> tasks,
                    std::map<std::string, RateLimit> rate_limits = {},
                    std::shared_ptr<const Clock> clock = nullptr);

  CompletionResponse complete(const CompletionRequest& request) override;
  bool knows_model(const std::string& model) const override;

  const SimModelSpec& model(const std::string& id) const;
  /// Unknown ids fall back to a default task of difficulty 0.
  SimTaskSpec task(const std::string& id) const;

  TokenCounter& token_counter() { return counter_; }

 private:
  std::map<std::string, SimModelSpec> models_;
  std::map<std::string, SimTaskSpec> tasks_;
  std::map<std::string, std::unique_ptr<TokenBucket>> buckets_;
  TokenCounter counter_;
};

}  // namespace costeval::sim
