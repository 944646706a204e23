#include "costeval/sim_provider.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "costeval/errors.hpp"

namespace costeval::sim {
namespace {

double clamp01(double v) { return std::clamp(v, 0.0, 1.0); }

bool in_unit(double v) { return std::isfinite(v) && v >= 0.0 && v <= 1.0; }

}  // namespace

void SimModelSpec::validate() const {
  if (model.empty()) throw InvalidArgument("simulated model needs an id");
  if (!in_unit(skill)) throw InvalidArgument(model + ": skill must be in [0, 1]");
  if (!in_unit(hidden_gap)) throw InvalidArgument(model + ": hidden_gap must be in [0, 1]");
  if (!std::isfinite(example_pass_bonus) || example_pass_bonus < 0.0) {
    throw InvalidArgument(model + ": example_pass_bonus must be >= 0");
  }
  if (!std::isfinite(latency_ms_per_output_token) || latency_ms_per_output_token < 0.0) {
    throw InvalidArgument(model + ": latency_ms_per_output_token must be >= 0");
  }
}

void SimTaskSpec::validate() const {
  if (task_id.empty()) throw InvalidArgument("task needs an id");
  if (!in_unit(difficulty)) {
    throw InvalidArgument(task_id + ": difficulty must be in [0, 1]");
  }
}

SuccessProbabilities success_probabilities(const SimModelSpec& model,
                                           const SimTaskSpec& task,
                                           double temperature) {
  SuccessProbabilities p;
  p.base = clamp01(model.skill - task.difficulty);
  p.example = clamp01(p.base + model.example_pass_bonus + kTemperatureBonus * temperature);
  p.hidden_given_example = clamp01(1.0 - model.hidden_gap);
  p.residual = clamp01(p.base * (1.0 - model.hidden_gap) * kResidualFactor);
  return p;
}

std::int64_t quantize_temperature(double temperature) {
  return static_cast<std::int64_t>(std::llround(temperature / kTemperatureQuantum));
}

random::Hash128 draw_key(const SeedMaterial& seed, const std::string& model,
                         const std::string& task_id, double temperature) {
  const std::string prefix = seed.bytes();
  return random::KeyBuilder()
      .add_bytes({reinterpret_cast<const std::uint8_t*>(prefix.data()), prefix.size()})
      .add(model)
      .add(task_id)
      .add_i64(quantize_temperature(temperature))
      .hash();
}

SuccessDraws sim_success_draws(const SimModelSpec& model, const SimTaskSpec& task,
                               double temperature, const SeedMaterial& seed) {
  const auto p = success_probabilities(model, task, temperature);
  const random::CounterRng rng(draw_key(seed, model.model, task.task_id, temperature));
  SuccessDraws d;
  d.example_pass = rng.uniform(kExampleStream) < p.example;
  const bool carried = d.example_pass && rng.uniform(kHiddenStream) < p.hidden_given_example;
  const bool residual = rng.uniform(kResidualStream) < p.residual;
  d.hidden_pass = carried || residual;
  return d;
}

std::string make_task_prompt(const SimTaskSpec& task) {
  const std::size_t bytes = static_cast<std::size_t>(task.prompt_tokens) * 4;
  std::string text = "Solve task " + task.task_id + ".";
  if (text.size() > bytes) {
    text.resize(bytes);
  } else {
    text.append(bytes - text.size(), '.');
  }
  return text;
}

std::string encode_candidate(const std::string& model, const std::string& task_id,
                             std::uint32_t attempt, const SuccessDraws& draws) {
  std::ostringstream out;
  out << "SIM model=" << model << " task=" << task_id << " attempt=" << attempt
      << " example=" << (draws.example_pass ? 1 : 0)
      << " hidden=" << (draws.hidden_pass ? 1 : 0);
  return out.str();
}

std::optional<SuccessDraws> decode_candidate(const std::string& text) {
  if (text.rfind("SIM ", 0) != 0) return std::nullopt;
  auto flag = [&](const std::string& key) -> std::optional<bool> {
    const auto pos = text.find(" " + key + "=");
    if (pos == std::string::npos) return std::nullopt;
    const auto at = pos + key.size() + 2;
    if (at >= text.size()) return std::nullopt;
    if (text[at] == '1') return true;
    if (text[at] == '0') return false;
    return std::nullopt;
  };
  const auto example = flag("example");
  const auto hidden = flag("hidden");
  if (!example || !hidden) return std::nullopt;
  return SuccessDraws{*example, *hidden};
}

std::chrono::steady_clock::time_point ManualClock::now() const {
  std::lock_guard lock(mutex_);
  return now_;
}

void ManualClock::advance(std::chrono::milliseconds by) {
  std::lock_guard lock(mutex_);
  now_ += by;
}

TokenBucket::TokenBucket(RateLimit limit, std::shared_ptr<const Clock> clock)
    : limit_(limit), clock_(std::move(clock)), tokens_(limit.capacity),
      last_(clock_->now()) {
  if (!(limit_.capacity >= 1.0) || !(limit_.refill_per_minute > 0.0)) {
    throw InvalidArgument("rate limit needs capacity >= 1 and a positive refill rate");
  }
}

std::optional<std::chrono::milliseconds> TokenBucket::try_acquire() {
  std::lock_guard lock(mutex_);
  const auto now = clock_->now();
  const double minutes =
      std::chrono::duration<double, std::ratio<60>>(now - last_).count();
  tokens_ = std::min(limit_.capacity, tokens_ + minutes * limit_.refill_per_minute);
  last_ = now;
  if (tokens_ >= 1.0) {
    tokens_ -= 1.0;
    return std::nullopt;
  }
  const double wait_minutes = (1.0 - tokens_) / limit_.refill_per_minute;
  return std::chrono::milliseconds(
      static_cast<std::int64_t>(std::ceil(wait_minutes * 60'000.0)));
}

SimulatedProvider::SimulatedProvider(std::vector<SimModelSpec> models,
                                     std::vector<SimTaskSpec> tasks,
                                     std::map<std::string, RateLimit> rate_limits,
                                     std::shared_ptr<const Clock> clock) {
  for (auto& m : models) {
    m.validate();
    const std::string id = m.model;
    if (!models_.emplace(id, std::move(m)).second) {
      throw InvalidArgument("duplicate simulated model " + id);
    }
  }
  for (auto& t : tasks) {
    t.validate();
    const std::string id = t.task_id;
    if (!tasks_.emplace(id, std::move(t)).second) {
      throw InvalidArgument("duplicate simulated task " + id);
    }
  }
  if (!rate_limits.empty() && !clock) clock = std::make_shared<SteadyClock>();
  for (const auto& [model, limit] : rate_limits) {
    if (models_.count(model) == 0) throw UnknownModel({model});
    buckets_.emplace(model, std::make_unique<TokenBucket>(limit, clock));
  }
}

bool SimulatedProvider::knows_model(const std::string& model) const {
  return models_.count(model) != 0;
}

const SimModelSpec& SimulatedProvider::model(const std::string& id) const {
  auto it = models_.find(id);
  if (it == models_.end()) throw UnknownModel({id});
  return it->second;
}

SimTaskSpec SimulatedProvider::task(const std::string& id) const {
  auto it = tasks_.find(id);
  if (it != tasks_.end()) return it->second;
  return SimTaskSpec{id, 0.0, 0};
}

CompletionResponse SimulatedProvider::complete(const CompletionRequest& request) {
  request.validate();
  const SimModelSpec& spec = model(request.model);
  if (auto it = buckets_.find(request.model); it != buckets_.end()) {
    if (auto wait = it->second->try_acquire()) {
      throw RateLimited(*wait, "rate limited on " + request.model);
    }
  }
  const SeedMaterial& seed = request.seed_material;
  const SimTaskSpec task_spec = task(seed.task_id);
  const SuccessDraws draws = sim_success_draws(spec, task_spec, request.temperature, seed);

  const random::CounterRng rng(
      draw_key(seed, spec.model, task_spec.task_id, request.temperature));
  std::uint64_t output = 0;
  if (spec.output_tokens_mean > 0) {
    const std::uint64_t lo = (spec.output_tokens_mean + 1) / 2;
    const std::uint64_t hi = spec.output_tokens_mean + spec.output_tokens_mean / 2;
    output = lo + rng.below(kOutputTokenStream, hi - lo + 1);
  }
  output = std::min<std::uint64_t>(output, request.max_output_tokens);

  CompletionResponse response;
  response.text = encode_candidate(spec.model, task_spec.task_id,
                                   seed.attempt_index, draws);
  response.usage.input_tokens =
      counter_.count(request.prompt, spec.model) + spec.prompt_overhead_tokens;
  response.usage.output_tokens = output;
  response.latency = std::chrono::milliseconds(static_cast<std::int64_t>(
      std::llround(static_cast<double>(output) * spec.latency_ms_per_output_token)));
  return response;
}

}  // namespace costeval::sim
