#include "costeval/config.hpp"

#include <filesystem>
#include <set>

#include "costeval/errors.hpp"
#include "costeval/json_util.hpp"

namespace costeval {

using nlohmann::ordered_json;
namespace fs = std::filesystem;

namespace {

std::string resolve(const std::string& base_dir, const std::string& path) {
  const fs::path p(path);
  return p.is_absolute() ? path : (fs::path(base_dir) / p).string();
}

// A field holding either an inline object or a path to a JSON file.
ordered_json inline_or_file(const ordered_json& doc, const char* key,
                            const std::string& base_dir) {
  const auto& v = json_util::require(doc, key);
  if (v.is_string()) {
    return json_util::parse_strict(json_util::read_file(resolve(base_dir, v.get<std::string>())));
  }
  if (!v.is_object()) throw SchemaError(0, std::string("\"") + key + "\" must be a path or object");
  return v;
}

sim::SimModelSpec sim_model_from_json(const ordered_json& j) {
  using namespace json_util;
  sim::SimModelSpec m;
  m.model = require_string(j, "model");
  if (j.contains("skill")) m.skill = require_number(j, "skill");
  if (j.contains("example_pass_bonus")) m.example_pass_bonus = require_number(j, "example_pass_bonus");
  if (j.contains("hidden_gap")) m.hidden_gap = require_number(j, "hidden_gap");
  if (j.contains("prompt_overhead_tokens")) {
    m.prompt_overhead_tokens = require_uint(j, "prompt_overhead_tokens");
  }
  if (j.contains("output_tokens_mean")) m.output_tokens_mean = require_uint(j, "output_tokens_mean");
  if (j.contains("latency_ms_per_output_token")) {
    m.latency_ms_per_output_token = require_number(j, "latency_ms_per_output_token");
  }
  m.validate();
  return m;
}

ordered_json sim_model_to_json(const sim::SimModelSpec& m) {
  return {{"model", m.model},
          {"skill", m.skill},
          {"example_pass_bonus", m.example_pass_bonus},
          {"hidden_gap", m.hidden_gap},
          {"prompt_overhead_tokens", m.prompt_overhead_tokens},
          {"output_tokens_mean", m.output_tokens_mean},
          {"latency_ms_per_output_token", m.latency_ms_per_output_token}};
}

std::vector<double> number_array(const ordered_json& j, const char* key) {
  const auto& arr = json_util::require(j, key);
  if (!arr.is_array()) throw SchemaError(0, std::string("\"") + key + "\" must be an array");
  std::vector<double> out;
  for (const auto& v : arr) {
    if (!v.is_number()) throw SchemaError(0, std::string("\"") + key + "\" holds a non-number");
    out.push_back(v.get<double>());
  }
  return out;
}

std::vector<std::string> string_array(const ordered_json& j, const char* key) {
  const auto& arr = json_util::require(j, key);
  if (!arr.is_array()) throw SchemaError(0, std::string("\"") + key + "\" must be an array");
  std::vector<std::string> out;
  for (const auto& v : arr) {
    if (!v.is_string()) throw SchemaError(0, std::string("\"") + key + "\" holds a non-string");
    out.push_back(v.get<std::string>());
  }
  return out;
}

}  // namespace

std::string to_string(TaskOrderPolicy p) {
  return p == TaskOrderPolicy::given ? "given" : "shuffled_per_run";
}

ordered_json ProviderConfig::to_json() const {
  ordered_json j;
  if (kind == Kind::http) {
    j["kind"] = "http";
    j["endpoint"] = endpoint.to_json();
    return j;
  }
  j["kind"] = "sim";
  j["models"] = ordered_json::array();
  for (const auto& m : sim_models) j["models"].push_back(sim_model_to_json(m));
  j["rate_limits"] = ordered_json::object();
  for (const auto& [model, limit] : rate_limits) {
    j["rate_limits"][model] = {{"capacity", limit.capacity},
                               {"refill_per_minute", limit.refill_per_minute}};
  }
  return j;
}

ProviderConfig ProviderConfig::from_json(const ordered_json& doc, const std::string& base_dir) {
  using namespace json_util;
  ProviderConfig c;
  const std::string kind = require_string(doc, "kind");
  if (kind == "http") {
    c.kind = Kind::http;
    c.endpoint = EndpointConfig::from_json(inline_or_file(doc, "endpoint", base_dir));
    return c;
  }
  if (kind != "sim") throw ConfigError("unknown provider kind \"" + kind + "\"");
  const auto& models = require(doc, "models");
  if (!models.is_array()) throw SchemaError(0, "\"models\" must be an array");
  for (const auto& m : models) c.sim_models.push_back(sim_model_from_json(m));
  if (doc.contains("rate_limits")) {
    const auto& limits = require(doc, "rate_limits");
    if (!limits.is_object()) throw SchemaError(0, "\"rate_limits\" must be an object");
    for (const auto& [model, l] : limits.items()) {
      c.rate_limits[model] = {require_number(l, "capacity"),
                              require_number(l, "refill_per_minute")};
    }
  }
  return c;
}

ordered_json OptimizerConfig::to_json() const {
  return {{"n_trials", n_trials},
          {"temperatures", temperatures},
          {"max_demos", max_demos},
          {"train_size", train_size},
          {"val_size", val_size},
          {"dev_size", dev_size},
          {"seed", seed},
          {"token_objective", token_objective},
          {"modules", agent.module_models},
          {"demo_gain", agent.demo_gain},
          {"formatting_gain", agent.formatting_gain},
          {"formatting_text", agent.formatting_text}};
}

OptimizerConfig OptimizerConfig::from_json(const ordered_json& doc) {
  using namespace json_util;
  OptimizerConfig c;
  if (doc.contains("n_trials")) c.n_trials = static_cast<std::uint32_t>(require_uint(doc, "n_trials"));
  if (doc.contains("temperatures")) c.temperatures = number_array(doc, "temperatures");
  if (doc.contains("max_demos")) c.max_demos = require_uint(doc, "max_demos");
  if (doc.contains("train_size")) c.train_size = require_uint(doc, "train_size");
  if (doc.contains("val_size")) c.val_size = require_uint(doc, "val_size");
  if (doc.contains("dev_size")) c.dev_size = require_uint(doc, "dev_size");
  if (doc.contains("seed")) c.seed = require_uint(doc, "seed");
  if (doc.contains("token_objective")) c.token_objective = require_bool(doc, "token_objective");
  c.agent.module_models = string_array(doc, "modules");
  if (doc.contains("demo_gain")) c.agent.demo_gain = require_number(doc, "demo_gain");
  if (doc.contains("formatting_gain")) c.agent.formatting_gain = require_number(doc, "formatting_gain");
  if (doc.contains("formatting_text")) c.agent.formatting_text = require_string(doc, "formatting_text");
  if (c.n_trials == 0) throw ConfigError("optimizer n_trials must be at least 1");
  if (c.temperatures.empty()) throw ConfigError("optimizer needs candidate temperatures");
  if (c.agent.module_models.empty()) throw ConfigError("optimizer needs at least one module");
  if (c.train_size == 0 || c.val_size == 0) {
    throw ConfigError("optimizer train and validation splits must be non-empty");
  }
  return c;
}

void EvalConfig::validate() const {
  manifest.validate();
  if (repetitions < 1) throw ConfigError("repetitions must be at least 1");
  if (strategies.empty()) throw ConfigError("no strategies configured");
  if (parallelism < 1) throw ConfigError("parallelism must be at least 1");
  std::set<std::string> ids;
  std::set<std::string> models;
  for (const auto& s : strategies) {
    strategies::validate(s);
    const std::string id = strategies::strategy_id(s);
    if (!ids.insert(id).second) throw ConfigError("strategy listed twice: " + id);
    for (const auto& m : strategies::models_of(s)) models.insert(m);
  }
  if (optimizer) {
    for (const auto& m : optimizer->agent.module_models) models.insert(m);
    const std::size_t need = optimizer->train_size + optimizer->val_size + optimizer->dev_size;
    if (need > manifest.tasks.size()) {
      throw ConfigError("optimizer splits need " + std::to_string(need) + " tasks, manifest has " +
                        std::to_string(manifest.tasks.size()));
    }
  }
  std::set<std::string> known;
  if (provider.kind == ProviderConfig::Kind::sim) {
    for (const auto& m : provider.sim_models) known.insert(m.model);
  } else {
    for (const auto& [m, remote] : provider.endpoint.models) known.insert(m);
  }
  std::vector<std::string> unpriced;
  std::vector<std::string> unknown;
  for (const auto& m : models) {
    if (!price_sheet.contains(m)) unpriced.push_back(m);
    if (known.count(m) == 0) unknown.push_back(m);
  }
  auto join = [](const std::vector<std::string>& v) {
    std::string out;
    for (const auto& s : v) out += (out.empty() ? "" : ", ") + s;
    return out;
  };
  if (!unpriced.empty()) throw ConfigError("models missing from the price sheet: " + join(unpriced));
  if (!unknown.empty()) throw ConfigError("models unknown to the provider: " + join(unknown));
}

ordered_json EvalConfig::to_json() const {
  ordered_json j;
  j["manifest"] = manifest.to_json();
  j["strategies"] = ordered_json::array();
  for (const auto& s : strategies) j["strategies"].push_back(strategies::to_json(s));
  j["repetitions"] = repetitions;
  j["base_seed"] = base_seed;
  j["price_sheet"] = price_sheet.to_json();
  j["provider"] = provider.to_json();
  j["task_order_policy"] = to_string(task_order_policy);
  j["parallelism"] = parallelism;
  j["max_output_tokens"] = max_output_tokens;
  if (optimizer) j["optimizer"] = optimizer->to_json();
  return j;
}

EvalConfig EvalConfig::from_json(const ordered_json& doc, const std::string& base_dir) {
  using namespace json_util;
  EvalConfig c;
  try {
    if (!doc.is_object()) throw SchemaError(0, "config must be an object");
    c.manifest = BenchmarkManifest::from_json(inline_or_file(doc, "manifest", base_dir));
    const auto& strategies = require(doc, "strategies");
    if (!strategies.is_array()) throw SchemaError(0, "\"strategies\" must be an array");
    for (const auto& s : strategies) c.strategies.push_back(strategies::strategy_from_json(s));
    if (doc.contains("repetitions")) {
      c.repetitions = static_cast<std::uint32_t>(require_uint(doc, "repetitions"));
    }
    if (doc.contains("base_seed")) c.base_seed = require_uint(doc, "base_seed");
    c.price_sheet = PriceSheet::from_json(inline_or_file(doc, "price_sheet", base_dir));
    c.provider = ProviderConfig::from_json(require(doc, "provider"), base_dir);
    if (doc.contains("task_order_policy")) {
      const std::string p = require_string(doc, "task_order_policy");
      if (p == "given") {
        c.task_order_policy = TaskOrderPolicy::given;
      } else if (p == "shuffled_per_run") {
        c.task_order_policy = TaskOrderPolicy::shuffled_per_run;
      } else {
        throw ConfigError("unknown task_order_policy \"" + p + "\"");
      }
    }
    if (doc.contains("parallelism")) {
      c.parallelism = static_cast<unsigned>(require_uint(doc, "parallelism"));
    }
    if (doc.contains("max_output_tokens")) {
      c.max_output_tokens = static_cast<std::uint32_t>(require_uint(doc, "max_output_tokens"));
    }
    if (doc.contains("optimizer")) c.optimizer = OptimizerConfig::from_json(doc["optimizer"]);
  } catch (const SchemaError& e) {
    throw ConfigError(std::string("config: ") + e.what());
  } catch (const InvalidArgument& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  c.validate();
  return c;
}

EvalConfig EvalConfig::load(const std::string& path) {
  ordered_json doc;
  try {
    doc = json_util::parse_strict(json_util::read_file(path));
  } catch (const SchemaError& e) {
    throw ConfigError(path + ": " + e.what());
  }
  return from_json(doc, fs::path(path).parent_path().string().empty()
                            ? std::string(".")
                            : fs::path(path).parent_path().string());
}

std::unique_ptr<Provider> make_provider(const ProviderConfig& config,
                                        const BenchmarkManifest& manifest) {
  if (config.kind == ProviderConfig::Kind::http) {
    return std::make_unique<HttpProvider>(config.endpoint);
  }
  return std::make_unique<sim::SimulatedProvider>(config.sim_models, manifest.tasks,
                                                  config.rate_limits);
}

}  // namespace costeval
