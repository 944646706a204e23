#include "costeval/optimizer.hpp"

#include <algorithm>
#include <numeric>
#include <set>

#include "costeval/errors.hpp"
#include "costeval/parallel.hpp"
#include "costeval/random.hpp"
#include "costeval/sim_provider.hpp"
#include "costeval/strategies.hpp"

namespace costeval::optimizer {

using nlohmann::ordered_json;

std::string Demo::serialize() const {
  return "Input: " + input + "\nTrace: " + trace + "\nOutput: " + output + "\n\n";
}

std::vector<std::string> DemoPool::provenance() const {
  std::vector<std::string> ids;
  ids.reserve(demos.size());
  for (const auto& d : demos) ids.push_back(d.sample_id);
  return ids;
}

void AgentConfig::validate(const SearchSpace& space, std::size_t pool_size) const {
  for (double t : module_temperatures) {
    if (std::find(space.temperatures.begin(), space.temperatures.end(), t) ==
        space.temperatures.end()) {
      throw InvalidArgument("temperature " + std::to_string(t) + " is not a candidate");
    }
  }
  if (demo_indices.size() > space.max_demos) {
    throw InvalidArgument("too many demos: " + std::to_string(demo_indices.size()));
  }
  std::set<std::size_t> seen;
  for (std::size_t i : demo_indices) {
    if (i >= pool_size) throw InvalidArgument("demo index out of range: " + std::to_string(i));
    if (!seen.insert(i).second) {
      throw InvalidArgument("demo index repeated: " + std::to_string(i));
    }
  }
}

ordered_json to_json(const AgentConfig& config) {
  return {{"module_temperatures", config.module_temperatures},
          {"demo_indices", config.demo_indices},
          {"include_formatting", config.include_formatting}};
}

ordered_json to_json(const TrialResult& trial) {
  return {{"trial_index", trial.trial_index},
          {"val_accuracy", trial.val_accuracy},
          {"prompt_tokens", trial.prompt_tokens},
          {"config", to_json(trial.config)}};
}

std::uint64_t prompt_tokens(const AgentConfig& config, const DemoPool& pool,
                            std::uint64_t formatting_tokens) {
  std::uint64_t total = config.include_formatting ? formatting_tokens : 0;
  for (std::size_t i : config.demo_indices) total += pool.demos.at(i).token_count;
  return total;
}

SimPipelineAgent::SimPipelineAgent(Options options) : options_(std::move(options)) {
  if (options_.module_models.empty()) {
    throw InvalidArgument("pipeline agent needs at least one module");
  }
  if (!(options_.demo_gain >= 0.0) || !(options_.formatting_gain >= 0.0)) {
    throw InvalidArgument("pipeline gains must be non-negative");
  }
}

std::string SimPipelineAgent::build_prompt(const std::string& formatting,
                                           const AgentConfig& config, const DemoPool& pool,
                                           const Sample& sample, std::size_t module_index) {
  std::string prompt;
  if (config.include_formatting) prompt += formatting + "\n\n";
  for (std::size_t i : config.demo_indices) prompt += pool.demos.at(i).serialize();
  prompt += "Module " + std::to_string(module_index) + "\nInput: " + sample.input + "\n";
  return prompt;
}

AgentOutcome SimPipelineAgent::run(const Sample& sample, const AgentConfig& config,
                                   const DemoPool& pool, std::uint64_t run_seed,
                                   Provider& provider) const {
  if (config.module_temperatures.size() != module_count()) {
    throw InvalidArgument("config has " + std::to_string(config.module_temperatures.size()) +
                          " temperatures for " + std::to_string(module_count()) + " modules");
  }
  AgentOutcome out;
  std::string last;
  for (std::size_t m = 0; m < module_count(); ++m) {
    CompletionRequest req;
    req.model = options_.module_models[m];
    req.prompt = build_prompt(options_.formatting_text, config, pool, sample, m);
    req.temperature = config.module_temperatures[m];
    req.max_output_tokens = options_.max_output_tokens;
    req.seed_material = {run_seed, sample.id, static_cast<std::uint32_t>(m)};

    CallRecord call;
    call.model = req.model;
    call.temperature = req.temperature;
    call.attempt_index = static_cast<std::uint32_t>(m);
    try {
      const auto resp = provider.complete(req);
      call.usage = resp.usage;
      call.latency_ms = resp.latency.count();
      call.transport_attempts = resp.attempts;
      out.calls.push_back(call);
      if (!out.prediction.trace.empty()) out.prediction.trace += "\n";
      out.prediction.trace += resp.text;
      last = resp.text;
    } catch (const Error& e) {
      call.error = strategies::error_code(e);
      out.calls.push_back(call);
      out.error = call.error;
      out.prediction.output = "error: " + call.error;
      return out;
    }
  }
  const auto draws = sim::decode_candidate(last);
  bool correct = draws && draws->hidden_pass;
  const double gain = options_.demo_gain * static_cast<double>(config.demo_indices.size()) +
                      (config.include_formatting ? options_.formatting_gain : 0.0);
  if (!correct && gain > 0.0) {
    const random::CounterRng rng(
        random::KeyBuilder().add(run_seed).add(sample.id).add("demo-gain").hash());
    correct = rng.uniform(0) < std::min(1.0, gain);
  }
  out.prediction.output = correct ? sample.ground_truth : "incorrect: " + last;
  return out;
}

AgentConfig baseline_config(std::size_t module_count) {
  AgentConfig c;
  c.module_temperatures.assign(module_count, 0.0);
  return c;
}

namespace {

void require_unique_ids(const std::vector<Sample>& split, const char* name) {
  std::set<std::string> seen;
  for (const auto& s : split) {
    if (s.id.empty()) throw InvalidArgument(std::string(name) + " sample with empty id");
    if (!seen.insert(s.id).second) {
      throw InvalidArgument(std::string(name) + " sample id repeated: " + s.id);
    }
  }
}

struct Evaluation {
  std::vector<AgentOutcome> outcomes;
  std::vector<bool> accepted;
  std::size_t passes = 0;
};

Evaluation evaluate(const std::vector<Sample>& split, const AgentConfig& config,
                    const DemoPool& pool, const Agent& agent, const TaskMetric& metric,
                    Provider& provider, std::uint64_t run_seed, unsigned parallelism) {
  Evaluation ev;
  ev.outcomes.resize(split.size());
  ev.accepted.assign(split.size(), false);
  std::vector<char> ok(split.size(), 0);
  parallel_for(split.size(), parallelism, [&](std::size_t i) {
    ev.outcomes[i] = agent.run(split[i], config, pool, run_seed, provider);
    ok[i] = ev.outcomes[i].error.empty() &&
            metric.accept(ev.outcomes[i].prediction, split[i].ground_truth);
  });
  for (std::size_t i = 0; i < split.size(); ++i) {
    ev.accepted[i] = ok[i] != 0;
    ev.passes += ok[i] ? 1 : 0;
  }
  return ev;
}

RunRecord to_run(const std::string& id, std::uint32_t index, std::uint64_t seed,
                 const std::vector<Sample>& split, const Evaluation& ev) {
  RunRecord run;
  run.strategy_id = id;
  run.run_index = index;
  run.seed = seed;
  for (std::size_t i = 0; i < split.size(); ++i) {
    run.task_order.push_back(split[i].id);
    TaskResult r;
    r.task_id = split[i].id;
    r.success = ev.accepted[i];
    r.calls = ev.outcomes[i].calls;
    r.error = ev.outcomes[i].error;
    for (const auto& c : r.calls) r.wall_time_ms += c.latency_ms;
    run.results.push_back(std::move(r));
  }
  return run;
}

double accuracy(const Evaluation& ev) {
  return ev.outcomes.empty() ? 0.0
                             : static_cast<double>(ev.passes) /
                                   static_cast<double>(ev.outcomes.size());
}

bool dominates(const TrialResult& a, const TrialResult& b, bool token_objective) {
  if (!token_objective) return a.val_accuracy > b.val_accuracy;
  return a.val_accuracy >= b.val_accuracy && a.prompt_tokens <= b.prompt_tokens &&
         (a.val_accuracy > b.val_accuracy || a.prompt_tokens < b.prompt_tokens);
}

}  // namespace

BootstrapResult bootstrap_demos(const std::vector<Sample>& train, const Agent& agent,
                                const TaskMetric& metric, Provider& provider,
                                std::uint64_t seed, unsigned parallelism) {
  if (train.empty()) throw InvalidArgument("training split is empty");
  require_unique_ids(train, "training");
  const std::uint64_t run_seed = random::derive_seed(seed, kBootstrapRunId, 0);
  const AgentConfig config = baseline_config(agent.module_count());
  const DemoPool empty;
  const Evaluation ev =
      evaluate(train, config, empty, agent, metric, provider, run_seed, parallelism);

  BootstrapResult out;
  for (std::size_t i = 0; i < train.size(); ++i) {
    if (!ev.accepted[i]) continue;
    Demo d{train[i].id, train[i].input, ev.outcomes[i].prediction.trace,
           ev.outcomes[i].prediction.output, 0};
    d.token_count = count_tokens(d.serialize());
    out.pool.demos.push_back(std::move(d));
  }
  out.run = to_run(kBootstrapRunId, 0, run_seed, train, ev);
  return out;
}

AgentConfig RandomSampler::sample(std::uint32_t trial_index, std::size_t module_count,
                                  std::size_t pool_size, const SearchSpace& space) const {
  if (space.temperatures.empty()) throw InvalidArgument("no candidate temperatures");
  const random::CounterRng rng(
      random::KeyBuilder().add(seed_).add("sampler").add_u32(trial_index).hash());
  std::uint32_t stream = 0;
  AgentConfig c;
  for (std::size_t m = 0; m < module_count; ++m) {
    c.module_temperatures.push_back(
        space.temperatures[rng.below(stream++, space.temperatures.size())]);
  }
  const std::size_t max_k = std::min(space.max_demos, pool_size);
  const std::size_t k = rng.below(stream++, max_k + 1);
  std::vector<std::size_t> indices(pool_size);
  std::iota(indices.begin(), indices.end(), 0);
  for (std::size_t j = 0; j < k; ++j) {
    const std::size_t r = j + rng.below(stream++, pool_size - j);
    std::swap(indices[j], indices[r]);
  }
  c.demo_indices.assign(indices.begin(), indices.begin() + static_cast<std::ptrdiff_t>(k));
  std::sort(c.demo_indices.begin(), c.demo_indices.end());
  c.include_formatting = rng.below(stream++, 2) == 1;
  return c;
}

std::vector<TrialResult> non_dominated_trials(const std::vector<TrialResult>& trials,
                                              bool token_objective) {
  std::vector<TrialResult> out;
  for (const auto& t : trials) {
    const bool dominated = std::any_of(trials.begin(), trials.end(), [&](const auto& o) {
      return dominates(o, t, token_objective);
    });
    if (!dominated) out.push_back(t);
  }
  std::sort(out.begin(), out.end(), [](const TrialResult& a, const TrialResult& b) {
    if (a.prompt_tokens != b.prompt_tokens) return a.prompt_tokens < b.prompt_tokens;
    return a.trial_index < b.trial_index;
  });
  return out;
}

OptimizeResult joint_optimize(const DemoPool& pool, const std::vector<Sample>& val,
                              const Agent& agent, const TaskMetric& metric,
                              Provider& provider, const OptimizeOptions& options,
                              const ConfigSampler* sampler) {
  if (options.n_trials == 0) throw InvalidArgument("n_trials must be at least 1");
  if (val.empty()) throw InvalidArgument("validation split is empty");
  require_unique_ids(val, "validation");
  const RandomSampler fallback(options.seed);
  if (sampler == nullptr) sampler = &fallback;
  const std::uint64_t formatting_tokens = count_tokens(agent.formatting_text());

  // Every trial sees the same draws, so scores differ only through the config.
  const std::uint64_t run_seed = random::derive_seed(options.seed, kTrialRunId, 0);
  OptimizeResult out;
  for (std::uint32_t t = 0; t < options.n_trials; ++t) {
    TrialResult trial;
    trial.trial_index = t;
    trial.config = sampler->sample(t, agent.module_count(), pool.size(), options.space);
    trial.config.validate(options.space, pool.size());
    trial.prompt_tokens = prompt_tokens(trial.config, pool, formatting_tokens);
    const Evaluation ev = evaluate(val, trial.config, pool, agent, metric, provider,
                                   run_seed, options.parallelism);
    trial.val_accuracy = accuracy(ev);
    out.runs.push_back(to_run(kTrialRunId, t, run_seed, val, ev));
    out.trials.push_back(std::move(trial));
  }
  out.pareto = non_dominated_trials(out.trials, options.token_objective);
  return out;
}

std::uint64_t predicted_search_calls(const Agent& agent, std::uint32_t n_trials,
                                     std::size_t val_size) {
  return static_cast<std::uint64_t>(agent.module_count()) * n_trials * val_size;
}

const Candidate& choose_deployment(const std::vector<Candidate>& candidates) {
  if (candidates.empty()) throw EmptyInput("no candidate configurations");
  const Candidate* best = &candidates.front();
  for (const auto& c : candidates) {
    const auto key = [](const Candidate& x) {
      return std::make_tuple(-x.dev_accuracy, x.trial.prompt_tokens, x.trial.trial_index);
    };
    if (key(c) < key(*best)) best = &c;
  }
  return *best;
}

Selection select_deployment(const std::vector<TrialResult>& pareto_set,
                            const std::vector<Sample>& dev, const DemoPool& pool,
                            const Agent& agent, const TaskMetric& metric,
                            Provider& provider, std::uint64_t seed, unsigned parallelism) {
  if (pareto_set.empty()) throw EmptyInput("no candidate configurations");
  Selection out;
  if (dev.empty()) throw InvalidArgument("development split is empty");
  require_unique_ids(dev, "development");
  // every candidate sees the same draws
  const std::uint64_t run_seed = random::derive_seed(seed, kSelectRunId, 0);
  for (std::size_t i = 0; i < pareto_set.size(); ++i) {
    const Evaluation ev = evaluate(dev, pareto_set[i].config, pool, agent, metric, provider,
                                   run_seed, parallelism);
    out.candidates.push_back({pareto_set[i], accuracy(ev)});
    out.runs.push_back(to_run(kSelectRunId, static_cast<std::uint32_t>(i), run_seed, dev, ev));
  }
  out.chosen = choose_deployment(out.candidates).trial;
  return out;
}

CostBreakdown config_cost_breakdown(const EvalLedger& optimization,
                                    const EvalLedger& deployment, const PriceSheet& sheet) {
  Money fixed = Money::zero(sheet.currency());
  for (const auto& run : optimization.runs) {
    for (const auto& task : run.results) {
      for (const auto& call : task.calls) {
        fixed += exact_cost_of_usage(call.usage, call.model, sheet);
      }
    }
  }
  Money variable = Money::zero(sheet.currency());
  std::uint64_t tasks = 0;
  for (const auto& run : deployment.runs) {
    for (const auto& task : run.results) {
      ++tasks;
      for (const auto& call : task.calls) {
        variable += exact_cost_of_usage(call.usage, call.model, sheet);
      }
    }
  }
  CostBreakdown out;
  out.fixed = fixed.rounded();
  out.variable_per_task = tasks == 0 ? variable
                                     : variable.divided_rounded(static_cast<std::int64_t>(tasks));
  out.tasks_assumed = tasks;
  return out;
}

OptimizationReport optimize(const std::vector<Sample>& train, const std::vector<Sample>& val,
                            const std::vector<Sample>& dev, const Agent& agent,
                            const TaskMetric& metric, Provider& provider,
                            const OptimizeOptions& options, const std::string& benchmark_id) {
  OptimizationReport report;
  report.ledger.benchmark_id = benchmark_id;
  auto boot = bootstrap_demos(train, agent, metric, provider, options.seed, options.parallelism);
  report.pool = std::move(boot.pool);
  report.ledger = append_run(report.ledger, std::move(boot.run));
  report.search = joint_optimize(report.pool, val, agent, metric, provider, options);
  for (const auto& run : report.search.runs) report.ledger = append_run(report.ledger, run);
  report.selection = select_deployment(report.search.pareto, dev, report.pool, agent, metric,
                                       provider, options.seed, options.parallelism);
  for (const auto& run : report.selection.runs) report.ledger = append_run(report.ledger, run);
  return report;
}

ordered_json to_json(const OptimizationReport& report) {
  ordered_json j;
  j["pool"] = {{"size", report.pool.size()}, {"provenance", report.pool.provenance()}};
  j["trials"] = ordered_json::array();
  for (const auto& t : report.search.trials) j["trials"].push_back(to_json(t));
  j["pareto"] = ordered_json::array();
  for (const auto& t : report.search.pareto) j["pareto"].push_back(to_json(t));
  ordered_json candidates = ordered_json::array();
  for (const auto& c : report.selection.candidates) {
    candidates.push_back({{"trial_index", c.trial.trial_index},
                          {"dev_accuracy", c.dev_accuracy}});
  }
  j["selection"] = {{"candidates", candidates}, {"chosen", to_json(report.selection.chosen)}};
  return j;
}

}  // namespace costeval::optimizer
