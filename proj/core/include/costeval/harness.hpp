#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "costeval/config.hpp"
#include "costeval/ledger.hpp"
#include "costeval/pareto.hpp"
#include "costeval/stats.hpp"

namespace costeval {

inline constexpr int kLeaderboardSchema = 1;

/// Seed of one run, keyed by strategy so that editing one strategy never
/// moves another's draws.
std::uint64_t run_seed(std::uint64_t base_seed, const std::string& strategy_id,
                       std::uint32_t run_index);

/// Task order of one run under the policy; shuffles are keyed by the run seed.
std::vector<std::string> task_order(const BenchmarkManifest& manifest, TaskOrderPolicy policy,
                                    std::uint64_t seed);

/// Runs every task of one strategy in `order` (tasks concurrently up to
/// `parallelism`), returning the run record.
RunRecord run_strategy_once(const strategies::StrategySpec& spec,
                            const BenchmarkManifest& manifest,
                            const std::vector<std::string>& order, std::uint64_t seed,
                            std::uint32_t run_index, Provider& provider,
                            const strategies::Verifiers& verifiers, unsigned parallelism,
                            std::uint32_t max_output_tokens = 1024);

/// Every strategy times every repetition, in config order. When `writer` is
/// given, each run is appended as soon as it completes.
EvalLedger run_eval(const EvalConfig& config, Provider& provider,
                    const strategies::Verifiers& verifiers, LedgerWriter* writer = nullptr);

/// Builds the provider from the config and uses the simulated verifiers.
EvalLedger run_eval(const EvalConfig& config, LedgerWriter* writer = nullptr);

struct RunFigure {
  std::uint32_t run_index = 0;
  std::uint64_t tasks = 0;
  std::uint64_t successes = 0;
  Money cost;
  std::map<std::string, TokenUsage> tokens;
  std::int64_t wall_time_ms = 0;
};

struct LeaderboardRow {
  std::string strategy_id;
  stats::SummaryStat accuracy;
  /// Statistics of the per-run costs in major units.
  stats::SummaryStat cost;
  /// Exact sum over runs, rounded once, and that sum divided by the run count.
  Money total_cost;
  Money mean_cost;
  Money min_cost;
  Money max_cost;
  stats::SummaryStat wall_time_ms;
  std::map<std::string, TokenUsage> tokens;
  std::vector<RunFigure> runs;
  std::uint64_t successes = 0;
  std::uint64_t tasks = 0;
};

struct Leaderboard {
  std::string benchmark_id;
  PriceSheet price_sheet;
  /// Sorted by mean accuracy, descending; ties by id.
  std::vector<LeaderboardRow> rows;
  pareto::Frontier frontier;

  std::vector<pareto::ParetoPoint> points() const;
};

/// Aggregates the ledger under the sheet. Throws UnknownModel.
Leaderboard build_leaderboard(const EvalLedger& ledger, const PriceSheet& sheet);

/// Leaderboard JSON, schema 1:
/// {"schema", "benchmark_id", "price_sheet", "strategies": [{"id", "runs",
///  "accuracy", "cost", "wall_time_ms", "tokens", "per_run"}], "frontier"}.
nlohmann::ordered_json to_json(const Leaderboard& board);

/// Recomputes every cost in a leaderboard document from its own token counts
/// and price sheet. Returns one message per mismatch.
std::vector<std::string> check_leaderboard(const nlohmann::ordered_json& doc);

/// label,cost,accuracy,accuracy_low,accuracy_high,on_frontier
std::string frontier_csv(const Leaderboard& board);

struct VerdictDiff {
  std::string task_id;
  bool given = false;
  bool reversed = false;
};

struct OrderReport {
  std::string strategy_id;
  std::vector<VerdictDiff> diffs;
  bool pass() const { return diffs.empty(); }
};

/// Runs the strategy over the manifest in given and reversed order with the
/// same seed, each on a fresh provider, tasks one at a time.
OrderReport order_sensitivity_check(const EvalConfig& config,
                                    const strategies::StrategySpec& strategy);

nlohmann::ordered_json to_json(const OrderReport& report);

}  // namespace costeval
