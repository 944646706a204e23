#include "costeval/harness.hpp"

#include <set>

#include <gtest/gtest.h>

#include "costeval/errors.hpp"
#include "fixtures.hpp"
#include "oracles.hpp"

namespace costeval {
namespace {

const std::string kDir = COSTEVAL_CONFIG_DIR;

EvalConfig small_config(unsigned parallelism) {
  EvalConfig c = EvalConfig::load(kDir + "/eval.json");
  c.manifest.tasks.resize(30);
  c.repetitions = 2;
  c.parallelism = parallelism;
  c.optimizer.reset();
  return c;
}

TEST(Harness, RunSeedsAreKeyedByStrategy) {
  EXPECT_EQ(run_seed(1, "a", 0), random::derive_seed(1, "a", 0));
  EXPECT_NE(run_seed(1, "a", 0), run_seed(1, "b", 0));
  EXPECT_NE(run_seed(1, "a", 0), run_seed(1, "a", 1));
}

TEST(Harness, TaskOrderPolicies) {
  const EvalConfig c = small_config(1);
  const auto given = task_order(c.manifest, TaskOrderPolicy::given, 5);
  EXPECT_EQ(given, c.manifest.task_ids());
  const auto s1 = task_order(c.manifest, TaskOrderPolicy::shuffled_per_run, 5);
  const auto s2 = task_order(c.manifest, TaskOrderPolicy::shuffled_per_run, 6);
  EXPECT_EQ(s1, task_order(c.manifest, TaskOrderPolicy::shuffled_per_run, 5));
  EXPECT_NE(s1, given);
  EXPECT_NE(s1, s2);
  EXPECT_EQ(std::multiset<std::string>(s1.begin(), s1.end()),
            std::multiset<std::string>(given.begin(), given.end()));
}

TEST(Harness, ReplayIsIdenticalAcrossParallelismWidths) {
  const EvalLedger a = run_eval(small_config(1));
  const EvalLedger b = run_eval(small_config(8));
  const EvalLedger c = run_eval(small_config(1));
  EXPECT_TRUE(replay_equal(a, b));
  EXPECT_TRUE(replay_equal(a, c));
  EXPECT_EQ(a.runs.size(), 10u);
  EXPECT_EQ(to_jsonl(a), to_jsonl(c));
}

TEST(Harness, AddingAStrategyLeavesOthersUntouched) {
  EvalConfig one = small_config(2);
  one.strategies.resize(1);
  EvalConfig all = small_config(2);
  const EvalLedger a = run_eval(one);
  const EvalLedger b = run_eval(all);
  for (const auto& run : a.runs) {
    const RunRecord* other = b.find_run(run.strategy_id, run.run_index);
    ASSERT_NE(other, nullptr);
    EXPECT_TRUE(replay_equal(run, *other));
  }
}

TEST(Harness, ShuffledOrderDoesNotChangeVerdictsWithoutRateLimits) {
  EvalConfig c = small_config(1);
  c.task_order_policy = TaskOrderPolicy::shuffled_per_run;
  const EvalLedger shuffled = run_eval(c);
  const EvalLedger given = run_eval(small_config(1));
  for (const auto& run : shuffled.runs) {
    const RunRecord* g = given.find_run(run.strategy_id, run.run_index);
    ASSERT_NE(g, nullptr);
    EXPECT_NE(run.task_order, g->task_order);
    std::map<std::string, bool> verdicts;
    for (const auto& r : g->results) verdicts[r.task_id] = r.success;
    for (const auto& r : run.results) EXPECT_EQ(verdicts.at(r.task_id), r.success);
  }
}

TEST(Harness, WriterReceivesEveryRun) {
  const auto dir = fixtures::temp_dir("harness-writer");
  const EvalConfig c = small_config(2);
  LedgerWriter writer((dir / "l.jsonl").string(), c.manifest.benchmark_id);
  const EvalLedger ledger = run_eval(c, &writer);
  EXPECT_EQ(load_ledger((dir / "l.jsonl").string()), ledger);
}

TEST(Leaderboard, SelfConsistentAndExternallyCheckable) {
  const EvalConfig c = small_config(4);
  const EvalLedger ledger = run_eval(c);
  const Leaderboard board = build_leaderboard(ledger, c.price_sheet);
  ASSERT_EQ(board.rows.size(), 5u);
  for (std::size_t i = 1; i < board.rows.size(); ++i) {
    EXPECT_GE(board.rows[i - 1].accuracy.mean, board.rows[i].accuracy.mean);
  }
  const auto doc = to_json(board);
  EXPECT_EQ(doc["schema"], 1);
  EXPECT_TRUE(check_leaderboard(doc).empty());
  EXPECT_EQ(reprice(ledger, c.price_sheet).at(board.rows[0].strategy_id), board.rows[0].total_cost);

  // Independent recomputation from the document's own token counts.
  const auto& prices = doc["price_sheet"]["models"];
  for (const auto& s : doc["strategies"]) {
    oracle::cpp_rational total = 0;
    for (const auto& [model, u] : s["tokens"].items()) {
      total += oracle::parse_decimal(prices[model]["input_per_token"].get<std::string>()) *
                   u["input"].get<std::uint64_t>() +
               oracle::parse_decimal(prices[model]["output_per_token"].get<std::string>()) *
                   u["output"].get<std::uint64_t>();
    }
    EXPECT_EQ(s["cost"]["total"].get<std::string>(), oracle::format_money6(total));
    EXPECT_EQ(s["cost"]["mean"].get<std::string>(),
              oracle::format_money6(total / s["runs"].get<int>()));
  }

  auto tampered = doc;
  tampered["strategies"][0]["cost"]["total"] = "0.000001";
  EXPECT_FALSE(check_leaderboard(tampered).empty());
  auto wrong_schema = doc;
  wrong_schema["schema"] = 2;
  EXPECT_FALSE(check_leaderboard(wrong_schema).empty());
}

TEST(Leaderboard, ScaledPricesKeepTheFrontier) {
  const EvalConfig c = small_config(4);
  const EvalLedger ledger = run_eval(c);
  const Leaderboard base = build_leaderboard(ledger, c.price_sheet);
  const Leaderboard doubled =
      build_leaderboard(ledger, c.price_sheet.scaled(Decimal::parse("2")));
  ASSERT_EQ(base.frontier.vertices.size(), doubled.frontier.vertices.size());
  for (std::size_t i = 0; i < base.frontier.vertices.size(); ++i) {
    EXPECT_EQ(base.frontier.vertices[i].label, doubled.frontier.vertices[i].label);
  }
  const Decimal one_unit = Decimal::parse("0.000001");
  for (std::size_t i = 0; i < base.rows.size(); ++i) {
    ASSERT_EQ(base.rows[i].strategy_id, doubled.rows[i].strategy_id);
    const Decimal gap = doubled.rows[i].total_cost.amount() - base.rows[i].total_cost.amount() * 2u;
    EXPECT_LE(gap, one_unit);
    EXPECT_GE(gap, -one_unit);
  }
}

TEST(Leaderboard, UnpricedModelIsRejected) {
  const EvalLedger ledger = run_eval(small_config(2));
  PriceSheet partial("USD", "2024-04-01");
  partial.add("gpt-4-turbo", {Decimal::parse("1"), Decimal::parse("1")});
  EXPECT_THROW(build_leaderboard(ledger, partial), UnknownModel);
}

TEST(Leaderboard, FrontierCsv) {
  const EvalConfig c = small_config(2);
  const Leaderboard board = build_leaderboard(run_eval(c), c.price_sheet);
  const std::string csv = frontier_csv(board);
  EXPECT_EQ(csv.substr(0, csv.find('\n')),
            "label,cost,accuracy,accuracy_low,accuracy_high,on_frontier");
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 6);
}

TEST(OrderSensitivity, RateLimitedRunChangesVerdicts) {
  const EvalConfig limited = EvalConfig::load(kDir + "/eval-rate-limited.json");
  const OrderReport r = order_sensitivity_check(limited, limited.strategies[0]);
  EXPECT_FALSE(r.pass());
  EXPECT_GE(r.diffs.size(), 1u);
  EvalConfig free = limited;
  free.provider.rate_limits.clear();
  EXPECT_TRUE(order_sensitivity_check(free, free.strategies[0]).pass());
  EXPECT_EQ(to_json(r)["verdict"], "FAIL");
}

}  // namespace
}  // namespace costeval
