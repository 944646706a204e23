#include "costeval/provider.hpp"

#include <cmath>

#include "costeval/errors.hpp"
#include "costeval/random.hpp"

namespace costeval {

std::string SeedMaterial::bytes() const {
  return random::KeyBuilder().add(run_seed).add(task_id).add_u32(attempt_index).bytes();
}

void CompletionRequest::validate() const {
  if (!std::isfinite(temperature) || temperature < 0.0 || temperature > 2.0) {
    throw InvalidArgument("temperature must be in [0, 2]");
  }
  if (max_output_tokens == 0) throw InvalidArgument("max_output_tokens must be >= 1");
}

std::uint64_t heuristic_token_count(std::string_view text) {
  return (static_cast<std::uint64_t>(text.size()) + 3) / 4;
}

void TokenCounter::register_tokenizer(const std::string& model, Tokenizer tokenizer) {
  std::lock_guard lock(mutex_);
  overrides_[model] = std::move(tokenizer);
}

std::uint64_t TokenCounter::count(std::string_view text, const std::string& model) const {
  Tokenizer t;
  {
    std::lock_guard lock(mutex_);
    auto it = overrides_.find(model);
    if (it != overrides_.end()) t = it->second;
  }
  return t ? t(text) : heuristic_token_count(text);
}

TokenCounter& default_token_counter() {
  static TokenCounter counter;
  return counter;
}

std::uint64_t count_tokens(std::string_view text, const std::string& model) {
  return default_token_counter().count(text, model);
}

}  // namespace costeval
