#pragma once

#include <chrono>
#include <cstdint>
#include <functional>
#include <map>
#include <mutex>
#include <string>
#include <string_view>

#include "costeval/pricing.hpp"

namespace costeval {

/// Everything a simulated provider needs to key its randomness: the run seed,
/// the task and the attempt. Different attempts give different draws even at
/// temperature zero.
struct SeedMaterial {
  std::uint64_t run_seed = 0;
  std::string task_id;
  std::uint32_t attempt_index = 0;

  /// Canonical byte encoding (little-endian seed, NUL-terminated task id,
  /// little-endian attempt index).
  std::string bytes() const;
};

struct CompletionRequest {
  std::string model;
  std::string prompt;
  double temperature = 0.0;
  std::uint32_t max_output_tokens = 1024;
  SeedMaterial seed_material;

  /// Throws InvalidArgument when temperature is outside [0, 2] or
  /// max_output_tokens is zero.
  void validate() const;
};

struct CompletionResponse {
  std::string text;
  TokenUsage usage;
  std::chrono::milliseconds latency{0};
  /// Transport attempts needed (1 unless the provider retried).
  std::uint32_t attempts = 1;
};

/// The model-call boundary. Implementations must tolerate concurrent calls.
/// complete() throws UnknownModel, RateLimited, TransportError or AuthError.
class Provider {
 public:
  virtual ~Provider() = default;

  virtual CompletionResponse complete(const CompletionRequest& request) = 0;
  virtual bool knows_model(const std::string& model) const = 0;
};

/// Default heuristic: ceil(bytes / 4).
std::uint64_t heuristic_token_count(std::string_view text);

/// Per-model tokenizer overrides on top of the byte heuristic.
class TokenCounter {
 public:
  using Tokenizer = std::function<std::uint64_t(std::string_view)>;

  void register_tokenizer(const std::string& model, Tokenizer tokenizer);
  std::uint64_t count(std::string_view text, const std::string& model) const;

 private:
  mutable std::mutex mutex_;
  std::map<std::string, Tokenizer> overrides_;
};

/// Process-wide registry used by count_tokens.
TokenCounter& default_token_counter();

std::uint64_t count_tokens(std::string_view text, const std::string& model = {});

}  // namespace costeval
