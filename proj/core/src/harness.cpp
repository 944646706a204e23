#include "costeval/harness.hpp"

#include <algorithm>
#include <set>
#include <sstream>

#include "costeval/errors.hpp"
#include "costeval/parallel.hpp"
#include "costeval/random.hpp"

namespace costeval {

using nlohmann::ordered_json;

std::uint64_t run_seed(std::uint64_t base_seed, const std::string& strategy_id,
                       std::uint32_t run_index) {
  return random::derive_seed(base_seed, strategy_id, run_index);
}

std::vector<std::string> task_order(const BenchmarkManifest& manifest, TaskOrderPolicy policy,
                                    std::uint64_t seed) {
  std::vector<std::string> ids = manifest.task_ids();
  if (policy == TaskOrderPolicy::shuffled_per_run && ids.size() > 1) {
    const random::CounterRng rng(random::KeyBuilder().add(seed).add("task-order").hash());
    for (std::size_t i = ids.size() - 1; i > 0; --i) {
      const auto j = rng.below(static_cast<std::uint32_t>(i), i + 1);
      std::swap(ids[i], ids[j]);
    }
  }
  return ids;
}

RunRecord run_strategy_once(const strategies::StrategySpec& spec,
                            const BenchmarkManifest& manifest,
                            const std::vector<std::string>& order, std::uint64_t seed,
                            std::uint32_t run_index, Provider& provider,
                            const strategies::Verifiers& verifiers, unsigned parallelism,
                            std::uint32_t max_output_tokens) {
  std::map<std::string, const sim::SimTaskSpec*> by_id;
  for (const auto& t : manifest.tasks) by_id[t.task_id] = &t;

  RunRecord run;
  run.strategy_id = strategies::strategy_id(spec);
  run.run_index = run_index;
  run.seed = seed;
  run.task_order = order;
  run.results.resize(order.size());
  parallel_for(order.size(), parallelism, [&](std::size_t i) {
    auto it = by_id.find(order[i]);
    if (it == by_id.end()) throw InvalidArgument("task not in manifest: " + order[i]);
    strategies::TaskInput input;
    input.task_id = order[i];
    input.prompt = sim::make_task_prompt(*it->second);
    input.run_seed = seed;
    input.max_output_tokens = max_output_tokens;
    run.results[i] = strategies::run_strategy(input, spec, provider, verifiers);
  });
  return run;
}

EvalLedger run_eval(const EvalConfig& config, Provider& provider,
                    const strategies::Verifiers& verifiers, LedgerWriter* writer) {
  config.validate();
  EvalLedger ledger;
  ledger.benchmark_id = config.manifest.benchmark_id;
  for (const auto& spec : config.strategies) {
    const std::string id = strategies::strategy_id(spec);
    for (std::uint32_t r = 0; r < config.repetitions; ++r) {
      const std::uint64_t seed = run_seed(config.base_seed, id, r);
      RunRecord run = run_strategy_once(spec, config.manifest,
                                        task_order(config.manifest, config.task_order_policy, seed),
                                        seed, r, provider, verifiers, config.parallelism,
                                        config.max_output_tokens);
      if (writer) writer->append(run);
      ledger = append_run(ledger, std::move(run));
    }
  }
  return ledger;
}

EvalLedger run_eval(const EvalConfig& config, LedgerWriter* writer) {
  const auto provider = make_provider(config.provider, config.manifest);
  const strategies::SimVerifier example(strategies::VerifierKind::example_tests);
  const strategies::SimVerifier hidden(strategies::VerifierKind::hidden_tests);
  return run_eval(config, *provider, {example, hidden}, writer);
}

namespace {

Money exact_cost(const std::map<std::string, TokenUsage>& tokens, const PriceSheet& sheet) {
  Money total = Money::zero(sheet.currency());
  for (const auto& [model, usage] : tokens) total += exact_cost_of_usage(usage, model, sheet);
  return total;
}

ordered_json interval_json(const std::optional<stats::Interval>& ci) {
  if (!ci) return nullptr;
  return ordered_json::array({ci->low, ci->high});
}

ordered_json stat_json(const stats::SummaryStat& s) {
  return {{"mean", s.mean}, {"min", s.min},       {"max", s.max},
          {"ci", interval_json(s.ci)}, {"n", s.n}, {"confidence", s.confidence}};
}

ordered_json tokens_json(const std::map<std::string, TokenUsage>& tokens) {
  ordered_json j = ordered_json::object();
  for (const auto& [model, u] : tokens) {
    j[model] = {{"input", u.input_tokens}, {"output", u.output_tokens}};
  }
  return j;
}

// Exact comparison of successes/tasks ratios.
bool accuracy_greater(const LeaderboardRow& a, const LeaderboardRow& b) {
  const auto lhs = static_cast<Decimal::urep>(a.successes) * b.tasks;
  const auto rhs = static_cast<Decimal::urep>(b.successes) * a.tasks;
  return lhs > rhs;
}

}  // namespace

std::vector<pareto::ParetoPoint> Leaderboard::points() const {
  std::vector<pareto::ParetoPoint> out;
  for (const auto& row : rows) {
    pareto::ParetoPoint p;
    p.label = row.strategy_id;
    p.cost = row.mean_cost;
    p.accuracy = row.accuracy.mean;
    if (row.tasks > 0) p.accuracy_exact = pareto::AccuracyRatio{row.successes, row.tasks};
    p.accuracy_ci = row.accuracy.ci;
    p.cost_ci = row.cost.ci;
    out.push_back(std::move(p));
  }
  return out;
}

Leaderboard build_leaderboard(const EvalLedger& ledger, const PriceSheet& sheet) {
  std::vector<std::string> missing;
  for (const auto& m : ledger.models()) {
    if (!sheet.contains(m)) missing.push_back(m);
  }
  if (!missing.empty()) throw UnknownModel(std::move(missing));

  Leaderboard board;
  board.benchmark_id = ledger.benchmark_id;
  board.price_sheet = sheet;
  for (const auto& id : ledger.strategy_ids()) {
    LeaderboardRow row;
    row.strategy_id = id;
    std::vector<double> accuracy;
    std::vector<double> cost;
    std::vector<double> wall;
    for (const auto& s : summarize(ledger, id)) {
      RunFigure f;
      f.run_index = s.run_index;
      f.tasks = s.tasks;
      f.successes = s.successes;
      f.tokens = s.usage_by_model;
      f.cost = exact_cost(f.tokens, sheet).rounded();
      f.wall_time_ms = s.wall_time_ms;
      for (const auto& [model, u] : f.tokens) row.tokens[model] += u;
      row.successes += s.successes;
      row.tasks += s.tasks;
      accuracy.push_back(s.accuracy);
      cost.push_back(f.cost.to_double());
      wall.push_back(static_cast<double>(s.wall_time_ms));
      row.runs.push_back(std::move(f));
    }
    row.accuracy = stats::summarize_values(accuracy);
    row.cost = stats::summarize_values(cost);
    row.wall_time_ms = stats::summarize_values(wall);
    const Money exact = exact_cost(row.tokens, sheet);
    row.total_cost = exact.rounded();
    row.mean_cost = exact.divided_rounded(static_cast<std::int64_t>(row.runs.size()));
    row.min_cost = row.max_cost = row.runs.front().cost;
    for (const auto& f : row.runs) {
      if (money_less(f.cost, row.min_cost)) row.min_cost = f.cost;
      if (money_less(row.max_cost, f.cost)) row.max_cost = f.cost;
    }
    board.rows.push_back(std::move(row));
  }
  std::stable_sort(board.rows.begin(), board.rows.end(),
                   [](const LeaderboardRow& a, const LeaderboardRow& b) {
                     if (accuracy_greater(a, b)) return true;
                     if (accuracy_greater(b, a)) return false;
                     return a.strategy_id < b.strategy_id;
                   });
  if (!board.rows.empty()) {
    const auto points = board.points();
    board.frontier = pareto::convex_frontier(points);
  }
  return board;
}

ordered_json to_json(const Leaderboard& board) {
  ordered_json j;
  j["schema"] = kLeaderboardSchema;
  j["benchmark_id"] = board.benchmark_id;
  j["price_sheet"] = board.price_sheet.to_json();
  j["strategies"] = ordered_json::array();
  for (const auto& row : board.rows) {
    ordered_json s;
    s["id"] = row.strategy_id;
    s["runs"] = row.runs.size();
    s["accuracy"] = stat_json(row.accuracy);
    s["accuracy"]["successes"] = row.successes;
    s["accuracy"]["tasks"] = row.tasks;
    s["cost"] = {{"currency", board.price_sheet.currency()},
                 {"mean", row.mean_cost.to_string()},
                 {"min", row.min_cost.to_string()},
                 {"max", row.max_cost.to_string()},
                 {"total", row.total_cost.to_string()},
                 {"ci", interval_json(row.cost.ci)}};
    s["wall_time_ms"] = stat_json(row.wall_time_ms);
    s["tokens"] = tokens_json(row.tokens);
    s["per_run"] = ordered_json::array();
    for (const auto& f : row.runs) {
      s["per_run"].push_back({{"run_index", f.run_index},
                              {"tasks", f.tasks},
                              {"successes", f.successes},
                              {"cost", f.cost.to_string()},
                              {"wall_time_ms", f.wall_time_ms},
                              {"tokens", tokens_json(f.tokens)}});
    }
    j["strategies"].push_back(std::move(s));
  }
  j["frontier"] = pareto::to_json(board.frontier);
  return j;
}

std::vector<std::string> check_leaderboard(const ordered_json& doc) {
  std::vector<std::string> problems;
  try {
    if (!doc.is_object() || doc.value("schema", 0) != kLeaderboardSchema) {
      return {"not a schema 1 leaderboard"};
    }
    const PriceSheet sheet = PriceSheet::from_json(doc.at("price_sheet"));
    auto tokens_of = [](const ordered_json& t) {
      std::map<std::string, TokenUsage> out;
      for (const auto& [model, u] : t.items()) {
        out[model] = {u.at("input").get<std::uint64_t>(), u.at("output").get<std::uint64_t>()};
      }
      return out;
    };
    std::map<std::string, std::string> mean_by_id;
    for (const auto& s : doc.at("strategies")) {
      const std::string id = s.at("id").get<std::string>();
      const auto& cost = s.at("cost");
      const Money exact = exact_cost(tokens_of(s.at("tokens")), sheet);
      const auto runs = s.at("runs").get<std::int64_t>();
      auto expect = [&](const std::string& what, const std::string& want,
                        const std::string& shown) {
        if (want != shown) problems.push_back(id + " " + what + ": shown " + shown +
                                              ", recomputed " + want);
      };
      expect("total", exact.rounded().to_string(), cost.at("total").get<std::string>());
      expect("mean", exact.divided_rounded(runs).to_string(), cost.at("mean").get<std::string>());
      mean_by_id[id] = cost.at("mean").get<std::string>();
      std::map<std::string, TokenUsage> summed;
      std::optional<Money> lo;
      std::optional<Money> hi;
      for (const auto& r : s.at("per_run")) {
        const auto tokens = tokens_of(r.at("tokens"));
        for (const auto& [m, u] : tokens) summed[m] += u;
        const Money c = exact_cost(tokens, sheet).rounded();
        expect("run " + std::to_string(r.at("run_index").get<std::uint32_t>()), c.to_string(),
               r.at("cost").get<std::string>());
        if (!lo || money_less(c, *lo)) lo = c;
        if (!hi || money_less(*hi, c)) hi = c;
      }
      if (summed != tokens_of(s.at("tokens"))) {
        problems.push_back(id + ": per-run tokens do not add up to the totals");
      }
      if (lo) {
        expect("min", lo->to_string(), cost.at("min").get<std::string>());
        expect("max", hi->to_string(), cost.at("max").get<std::string>());
      }
    }
    for (const auto& v : doc.at("frontier")) {
      const std::string label = v.at("label").get<std::string>();
      auto it = mean_by_id.find(label);
      if (it == mean_by_id.end()) {
        problems.push_back("frontier vertex " + label + " is not a listed strategy");
      } else if (it->second != v.at("cost").get<std::string>()) {
        problems.push_back("frontier vertex " + label + " cost differs from the strategy mean");
      }
    }
  } catch (const ordered_json::exception& e) {
    problems.push_back(std::string("malformed leaderboard: ") + e.what());
  } catch (const Error& e) {
    problems.push_back(e.what());
  }
  return problems;
}

std::string frontier_csv(const Leaderboard& board) {
  std::set<std::string> on;
  for (const auto& v : board.frontier.vertices) on.insert(v.label);
  std::ostringstream out;
  out << "label,cost,accuracy,accuracy_low,accuracy_high,on_frontier\n";
  out.precision(17);
  for (const auto& row : board.rows) {
    out << '"' << row.strategy_id << "\"," << row.mean_cost.to_string() << ','
        << row.accuracy.mean << ',';
    if (row.accuracy.ci) out << row.accuracy.ci->low << ',' << row.accuracy.ci->high;
    else out << ',';
    out << ',' << (on.count(row.strategy_id) ? 1 : 0) << '\n';
  }
  return out.str();
}

OrderReport order_sensitivity_check(const EvalConfig& config,
                                    const strategies::StrategySpec& strategy) {
  OrderReport report;
  report.strategy_id = strategies::strategy_id(strategy);
  const std::uint64_t seed = run_seed(config.base_seed, report.strategy_id, 0);
  const strategies::SimVerifier example(strategies::VerifierKind::example_tests);
  const strategies::SimVerifier hidden(strategies::VerifierKind::hidden_tests);

  std::vector<std::string> given = config.manifest.task_ids();
  std::vector<std::string> reversed(given.rbegin(), given.rend());
  auto verdicts = [&](const std::vector<std::string>& order) {
    const auto provider = make_provider(config.provider, config.manifest);
    const RunRecord run = run_strategy_once(strategy, config.manifest, order, seed, 0, *provider,
                                            {example, hidden}, 1, config.max_output_tokens);
    std::map<std::string, bool> out;
    for (const auto& r : run.results) out[r.task_id] = r.success;
    return out;
  };
  const auto a = verdicts(given);
  const auto b = verdicts(reversed);
  for (const auto& id : given) {
    if (a.at(id) != b.at(id)) report.diffs.push_back({id, a.at(id), b.at(id)});
  }
  return report;
}

ordered_json to_json(const OrderReport& report) {
  ordered_json diffs = ordered_json::array();
  for (const auto& d : report.diffs) {
    diffs.push_back({{"task_id", d.task_id}, {"given", d.given}, {"reversed", d.reversed}});
  }
  return {{"strategy_id", report.strategy_id},
          {"verdict", report.pass() ? "PASS" : "FAIL"},
          {"diffs", diffs}};
}

}  // namespace costeval
