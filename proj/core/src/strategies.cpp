#include "costeval/strategies.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <set>

#include "costeval/errors.hpp"
#include "costeval/json_util.hpp"
#include "costeval/sim_provider.hpp"

namespace costeval::strategies {

using nlohmann::ordered_json;

bool SimVerifier::check(const std::string& task_id, const std::string& candidate) const {
  const auto draws = sim::decode_candidate(candidate);
  if (!draws) return false;
  if (candidate.find(" task=" + task_id + " ") == std::string::npos) return false;
  return kind_ == VerifierKind::example_tests ? draws->example_pass : draws->hidden_pass;
}

namespace {

std::string format_number(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return ec == std::errc() ? std::string(buf, end) : std::to_string(v);
}

void check_temperature(double t) {
  if (!std::isfinite(t) || t < 0.0 || t > 2.0) {
    throw ConfigError("temperature out of range [0, 2]: " + format_number(t));
  }
}

struct Attempt {
  std::string model;
  double temperature;
};

bool safe_check(const Verifier& v, const std::string& task_id, const std::string& text) {
  try {
    return v.check(task_id, text);
  } catch (const std::exception&) {
    return false;  // a verifier that cannot judge the candidate fails it
  }
}

// Shared attempt loop: stop at the first example-test pass, otherwise score
// the last candidate.
TaskResult run_attempts(const TaskInput& task, const std::vector<Attempt>& attempts,
                        Provider& provider, const Verifiers& verifiers) {
  TaskResult result;
  result.task_id = task.task_id;
  std::string accepted;
  bool have_candidate = false;
  for (std::uint32_t i = 0; i < attempts.size(); ++i) {
    CompletionRequest req;
    req.model = attempts[i].model;
    req.prompt = task.prompt;
    req.temperature = attempts[i].temperature;
    req.max_output_tokens = task.max_output_tokens;
    req.seed_material = {task.run_seed, task.task_id, i};

    CallRecord call;
    call.model = req.model;
    call.temperature = req.temperature;
    call.attempt_index = i;
    call.purpose = CallPurpose::generate;
    try {
      const CompletionResponse resp = provider.complete(req);
      call.usage = resp.usage;
      call.latency_ms = resp.latency.count();
      call.transport_attempts = resp.attempts;
      result.calls.push_back(call);
      result.wall_time_ms += call.latency_ms;
      accepted = resp.text;
      have_candidate = true;
    } catch (const Error& e) {
      call.error = error_code(e);
      result.calls.push_back(call);
      result.error = call.error;
      result.success = false;
      result.example_tests_passed = false;
      return result;
    }
    if (safe_check(verifiers.example, task.task_id, accepted)) {
      result.example_tests_passed = true;
      break;
    }
  }
  result.success = have_candidate && safe_check(verifiers.hidden, task.task_id, accepted);
  return result;
}

}  // namespace

std::string error_code(const std::exception& e) {
  if (dynamic_cast<const RateLimited*>(&e)) return "rate_limited";
  if (dynamic_cast<const AuthError*>(&e)) return "auth_error";
  if (dynamic_cast<const TransportError*>(&e)) return "transport_error";
  if (dynamic_cast<const UnknownModel*>(&e)) return "unknown_model";
  return "provider_error";
}

std::string strategy_id(const StrategySpec& spec) {
  return std::visit(
      [](const auto& s) -> std::string {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, ZeroShot>) {
          return "zero_shot:" + s.model;
        } else if constexpr (std::is_same_v<T, Retry>) {
          return "retry:" + s.model + ":k" + std::to_string(s.max_attempts) + ":t" +
                 format_number(s.temperature);
        } else if constexpr (std::is_same_v<T, Warming>) {
          std::string out = "warming:" + s.model + ":";
          for (std::size_t i = 0; i < s.schedule.size(); ++i) {
            if (i) out += ",";
            out += format_number(s.schedule[i]);
          }
          return out;
        } else {
          std::string out = "escalation:";
          for (std::size_t i = 0; i < s.chain.size(); ++i) {
            if (i) out += ">";
            out += s.chain[i];
          }
          return out;
        }
      },
      spec);
}

void validate(const StrategySpec& spec) {
  std::visit(
      [](const auto& s) {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, Escalation>) {
          if (s.chain.empty()) throw ConfigError("escalation chain is empty");
          std::set<std::string> seen;
          for (const auto& m : s.chain) {
            if (m.empty()) throw ConfigError("escalation chain has an empty model id");
            if (!seen.insert(m).second) {
              throw ConfigError("escalation chain repeats model " + m);
            }
          }
        } else {
          if (s.model.empty()) throw ConfigError("strategy needs a model");
          if constexpr (std::is_same_v<T, Retry>) {
            if (s.max_attempts < 1) throw ConfigError("retry needs max_attempts >= 1");
            check_temperature(s.temperature);
          } else if constexpr (std::is_same_v<T, Warming>) {
            if (s.schedule.empty()) throw ConfigError("warming schedule is empty");
            for (double t : s.schedule) check_temperature(t);
          }
        }
      },
      spec);
}

std::vector<std::string> models_of(const StrategySpec& spec) {
  return std::visit(
      [](const auto& s) -> std::vector<std::string> {
        if constexpr (std::is_same_v<std::decay_t<decltype(s)>, Escalation>) {
          return s.chain;
        } else {
          return {s.model};
        }
      },
      spec);
}

void validate_models(const StrategySpec& spec,
                     const std::function<bool(const std::string&)>& known) {
  std::vector<std::string> missing;
  for (const auto& m : models_of(spec)) {
    if (!known(m)) missing.push_back(m);
  }
  if (!missing.empty()) throw UnknownModel(std::move(missing));
}

StrategySpec strategy_from_json(const ordered_json& doc) {
  using namespace json_util;
  StrategySpec spec;
  try {
    const std::string kind = require_string(doc, "kind");
    if (kind == "zero_shot") {
      spec = ZeroShot{require_string(doc, "model")};
    } else if (kind == "retry") {
      Retry r{require_string(doc, "model")};
      if (doc.contains("max_attempts")) {
        r.max_attempts = static_cast<std::uint32_t>(require_uint(doc, "max_attempts"));
      }
      if (doc.contains("temperature")) r.temperature = require_number(doc, "temperature");
      spec = r;
    } else if (kind == "warming") {
      Warming w{require_string(doc, "model")};
      if (doc.contains("schedule")) {
        w.schedule.clear();
        for (const auto& t : require(doc, "schedule")) {
          if (!t.is_number()) throw SchemaError(0, "schedule entries must be numbers");
          w.schedule.push_back(t.get<double>());
        }
      }
      spec = w;
    } else if (kind == "escalation") {
      Escalation e;
      const auto& chain = require(doc, "chain");
      if (!chain.is_array()) throw SchemaError(0, "chain must be an array");
      for (const auto& m : chain) {
        if (!m.is_string()) throw SchemaError(0, "chain entries must be strings");
        e.chain.push_back(m.get<std::string>());
      }
      spec = e;
    } else {
      throw ConfigError("unknown strategy kind: " + kind);
    }
  } catch (const SchemaError& e) {
    throw ConfigError(std::string("strategy: ") + e.what());
  }
  validate(spec);
  return spec;
}

ordered_json to_json(const StrategySpec& spec) {
  return std::visit(
      [](const auto& s) -> ordered_json {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, ZeroShot>) {
          return {{"kind", "zero_shot"}, {"model", s.model}};
        } else if constexpr (std::is_same_v<T, Retry>) {
          return {{"kind", "retry"}, {"model", s.model},
                  {"max_attempts", s.max_attempts}, {"temperature", s.temperature}};
        } else if constexpr (std::is_same_v<T, Warming>) {
          return {{"kind", "warming"}, {"model", s.model}, {"schedule", s.schedule}};
        } else {
          return {{"kind", "escalation"}, {"chain", s.chain}};
        }
      },
      spec);
}

TaskResult run_zero_shot(const TaskInput& task, const ZeroShot& spec,
                         Provider& provider, const Verifiers& verifiers) {
  return run_attempts(task, {{spec.model, 0.0}}, provider, verifiers);
}

TaskResult run_retry(const TaskInput& task, const Retry& spec, Provider& provider,
                     const Verifiers& verifiers) {
  std::vector<Attempt> attempts(spec.max_attempts, Attempt{spec.model, spec.temperature});
  return run_attempts(task, attempts, provider, verifiers);
}

TaskResult run_warming(const TaskInput& task, const Warming& spec,
                       Provider& provider, const Verifiers& verifiers) {
  std::vector<Attempt> attempts;
  for (double t : spec.schedule) attempts.push_back({spec.model, t});
  return run_attempts(task, attempts, provider, verifiers);
}

TaskResult run_escalation(const TaskInput& task, const Escalation& spec,
                          Provider& provider, const Verifiers& verifiers) {
  std::vector<Attempt> attempts;
  for (const auto& m : spec.chain) attempts.push_back({m, 0.0});
  return run_attempts(task, attempts, provider, verifiers);
}

TaskResult run_strategy(const TaskInput& task, const StrategySpec& spec,
                        Provider& provider, const Verifiers& verifiers) {
  return std::visit(
      [&](const auto& s) -> TaskResult {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, ZeroShot>) {
          return run_zero_shot(task, s, provider, verifiers);
        } else if constexpr (std::is_same_v<T, Retry>) {
          return run_retry(task, s, provider, verifiers);
        } else if constexpr (std::is_same_v<T, Warming>) {
          return run_warming(task, s, provider, verifiers);
        } else {
          return run_escalation(task, s, provider, verifiers);
        }
      },
      spec);
}

}  // namespace costeval::strategies
