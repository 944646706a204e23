#include "cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <filesystem>
#include <iomanip>
#include <optional>
#include <sstream>

#include "costeval/config.hpp"
#include "costeval/errors.hpp"
#include "costeval/harness.hpp"
#include "costeval/json_util.hpp"
#include "costeval/ledger.hpp"
#include "costeval/manifest.hpp"
#include "costeval/optimizer.hpp"
#include "costeval/pareto.hpp"
#include "costeval/pricing.hpp"

namespace costeval::cli {
namespace {

using nlohmann::ordered_json;

struct NoInput : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void require_file(const std::string& path) {
  if (!std::filesystem::is_regular_file(path)) throw NoInput("cannot read " + path);
}

void emit(const std::string& text, const std::string& path, std::ostream& out) {
  if (path.empty() || path == "-") {
    out << text;
  } else {
    json_util::write_file(path, text);
  }
}

std::string dump(const ordered_json& j) { return j.dump(2) + "\n"; }

std::vector<const LeaderboardRow*> in_ledger_order(const Leaderboard& board,
                                                   const EvalLedger& ledger) {
  std::vector<const LeaderboardRow*> rows;
  for (const auto& id : ledger.strategy_ids()) {
    for (const auto& r : board.rows) {
      if (r.strategy_id == id) rows.push_back(&r);
    }
  }
  return rows;
}

int cmd_run(const std::string& config_path, const std::string& out_path,
            std::optional<unsigned> parallelism, std::ostream& out) {
  require_file(config_path);
  EvalConfig config = EvalConfig::load(config_path);
  if (parallelism) {
    config.parallelism = *parallelism;
    config.validate();
  }
  LedgerWriter writer(out_path, config.manifest.benchmark_id);
  const EvalLedger ledger = run_eval(config, &writer);
  out << "wrote " << ledger.runs.size() << " runs of " << config.strategies.size()
      << " strategies to " << out_path << "\n";
  return kExitOk;
}

int cmd_reprice(const std::string& ledger_path, const std::string& sheet_path,
                const std::string& json_path, std::ostream& out) {
  require_file(ledger_path);
  require_file(sheet_path);
  const EvalLedger ledger = load_ledger(ledger_path);
  const PriceSheet sheet = PriceSheet::load(sheet_path);
  const auto totals = reprice(ledger, sheet);
  const Leaderboard board = build_leaderboard(ledger, sheet);

  ordered_json j;
  j["currency"] = sheet.currency();
  j["as_of"] = sheet.as_of();
  j["strategies"] = ordered_json::array();
  std::ostringstream text;
  text << std::left << std::setw(40) << "strategy" << std::right << std::setw(6) << "runs"
       << std::setw(16) << "total" << std::setw(16) << "mean/run" << "\n";
  for (const auto* row : in_ledger_order(board, ledger)) {
    ordered_json runs = ordered_json::array();
    for (const auto& f : row->runs) {
      runs.push_back({{"run_index", f.run_index}, {"cost", f.cost.to_string()}});
    }
    j["strategies"].push_back({{"id", row->strategy_id},
                               {"total", totals.at(row->strategy_id).to_string()},
                               {"mean_per_run", row->mean_cost.to_string()},
                               {"runs", runs}});
    text << std::left << std::setw(40) << row->strategy_id << std::right << std::setw(6)
         << row->runs.size() << std::setw(16) << totals.at(row->strategy_id).to_string()
         << std::setw(16) << row->mean_cost.to_string() << "\n";
  }
  text << "prices: " << sheet.currency() << " as of " << sheet.as_of() << "\n";
  if (json_path == "-") {
    out << dump(j);
  } else {
    out << text.str();
    if (!json_path.empty()) json_util::write_file(json_path, dump(j));
  }
  return kExitOk;
}

int cmd_frontier(const std::string& ledger_path, const std::string& sheet_path,
                 const std::string& json_path, const std::string& csv_path,
                 std::optional<std::string> budget, std::optional<double> min_accuracy,
                 std::ostream& out) {
  require_file(ledger_path);
  require_file(sheet_path);
  const EvalLedger ledger = load_ledger(ledger_path);
  const PriceSheet sheet = PriceSheet::load(sheet_path);
  const Leaderboard board = build_leaderboard(ledger, sheet);

  ordered_json j;
  j["currency"] = sheet.currency();
  j["frontier"] = pareto::to_json(board.frontier);
  j["points"] = ordered_json::array();
  for (const auto& p : board.points()) j["points"].push_back(pareto::to_json(p));
  if (budget || min_accuracy) {
    pareto::Constraint c;
    if (budget) {
      c = pareto::MaxBudget{Money::parse(*budget, sheet.currency())};
    } else {
      c = pareto::MinAccuracy{*min_accuracy};
    }
    j["recommendation"] = pareto::to_json(pareto::recommend(board.frontier, c));
  }
  emit(dump(j), json_path, out);
  if (!csv_path.empty()) emit(frontier_csv(board), csv_path, out);
  return kExitOk;
}

int cmd_export(const std::string& ledger_path, const std::string& sheet_path,
               const std::string& out_path, std::ostream& out) {
  require_file(ledger_path);
  require_file(sheet_path);
  const Leaderboard board = build_leaderboard(load_ledger(ledger_path), PriceSheet::load(sheet_path));
  emit(dump(to_json(board)), out_path, out);
  return kExitOk;
}

int cmd_lint(const std::string& manifest_path, bool as_json, std::ostream& out) {
  require_file(manifest_path);
  const LintReport report = lint_manifest(BenchmarkManifest::load(manifest_path));
  if (as_json) {
    out << dump(to_json(report));
  } else {
    out << to_string(report.verdict) << ": " << report.message << "\n";
  }
  switch (report.verdict) {
    case LintVerdict::pass: return kLintPass;
    case LintVerdict::warn: return kLintWarn;
    case LintVerdict::fail: return kLintFail;
  }
  return kLintFail;
}

std::vector<optimizer::Sample> samples(const BenchmarkManifest& m, std::size_t from,
                                       std::size_t count) {
  std::vector<optimizer::Sample> out;
  for (std::size_t i = from; i < from + count && i < m.tasks.size(); ++i) {
    const auto& t = m.tasks[i];
    out.push_back({t.task_id, sim::make_task_prompt(t), "answer:" + t.task_id});
  }
  return out;
}

int cmd_optimize(const std::string& config_path, const std::string& out_path,
                 const std::string& ledger_path, std::ostream& out) {
  require_file(config_path);
  const EvalConfig config = EvalConfig::load(config_path);
  if (!config.optimizer) throw ConfigError("config has no \"optimizer\" block");
  const OptimizerConfig& oc = *config.optimizer;

  const auto train = samples(config.manifest, 0, oc.train_size);
  const auto val = samples(config.manifest, oc.train_size, oc.val_size);
  const auto dev = oc.dev_size == 0
                       ? val
                       : samples(config.manifest, oc.train_size + oc.val_size, oc.dev_size);
  optimizer::OptimizeOptions options;
  options.n_trials = oc.n_trials;
  options.seed = oc.seed;
  options.space.temperatures = oc.temperatures;
  options.space.max_demos = oc.max_demos;
  options.token_objective = oc.token_objective;
  options.parallelism = config.parallelism;

  const auto provider = make_provider(config.provider, config.manifest);
  const optimizer::SimPipelineAgent agent(oc.agent);
  const optimizer::ExactMatch metric;
  const auto report = optimizer::optimize(train, val, dev, agent, metric, *provider, options,
                                          config.manifest.benchmark_id);

  EvalLedger deployment;
  deployment.benchmark_id = config.manifest.benchmark_id;
  for (std::size_t i = 0; i < report.selection.candidates.size(); ++i) {
    if (report.selection.candidates[i].trial.trial_index == report.selection.chosen.trial_index) {
      deployment.runs.push_back(report.selection.runs.at(i));
    }
  }
  const CostBreakdown cost =
      optimizer::config_cost_breakdown(report.ledger, deployment, config.price_sheet);

  ordered_json j = optimizer::to_json(report);
  j["deployment"] = optimizer::to_json(report.selection.chosen.config);
  j["cost"] = {{"currency", config.price_sheet.currency()},
               {"fixed", cost.fixed.to_string()},
               {"variable_per_task", cost.variable_per_task.to_string()},
               {"tasks_measured", cost.tasks_assumed}};
  j["provider_calls"] = [&] {
    std::uint64_t n = 0;
    for (const auto& run : report.ledger.runs) {
      for (const auto& t : run.results) n += t.calls.size();
    }
    return n;
  }();
  if (!ledger_path.empty()) save_ledger(report.ledger, ledger_path);
  emit(dump(j), out_path, out);
  return kExitOk;
}

int cmd_order_check(const std::string& config_path, const std::string& strategy,
                    std::ostream& out) {
  require_file(config_path);
  const EvalConfig config = EvalConfig::load(config_path);
  std::vector<OrderReport> reports;
  for (const auto& s : config.strategies) {
    if (!strategy.empty() && strategies::strategy_id(s) != strategy) continue;
    reports.push_back(order_sensitivity_check(config, s));
  }
  if (reports.empty()) throw UnknownStrategy(strategy);
  ordered_json j = ordered_json::array();
  bool pass = true;
  for (const auto& r : reports) {
    j.push_back(to_json(r));
    pass = pass && r.pass();
  }
  out << dump(j);
  return pass ? kExitOk : 1;
}

int exit_code(const Error& e) {
  switch (e.kind()) {
    case ErrorKind::usage: return kExitUsage;
    case ErrorKind::data: return kExitData;
    case ErrorKind::config: return kExitConfig;
    case ErrorKind::transport: return kExitUnavailable;
  }
  return kExitData;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Cost-aware evaluation of agent strategies", "costeval"};
  app.require_subcommand(1);
  std::function<int()> action;

  std::string config_path, ledger_path, sheet_path, out_path, json_path, csv_path, strategy;
  std::string manifest_path, opt_ledger_path;
  std::optional<unsigned> parallelism;
  std::optional<std::string> budget;
  std::optional<double> min_accuracy;
  bool as_json = false;

  auto* run = app.add_subcommand("run", "Evaluate every strategy and append runs to a ledger");
  run->add_option("config", config_path, "Eval config JSON")->required();
  std::string run_out = "ledger.jsonl";
  run->add_option("-o,--out", run_out, "Ledger JSONL to append to")->capture_default_str();
  run->add_option("--parallelism", parallelism, "Concurrent tasks per run");
  run->callback([&] { action = [&] { return cmd_run(config_path, run_out, parallelism, out); }; });

  auto* rep = app.add_subcommand("reprice", "Price a ledger under a price sheet");
  rep->add_option("ledger", ledger_path)->required();
  rep->add_option("sheet", sheet_path)->required();
  rep->add_option("--json", json_path, "Also write JSON here ('-' prints JSON instead of text)");
  rep->callback([&] { action = [&] { return cmd_reprice(ledger_path, sheet_path, json_path, out); }; });

  auto* fr = app.add_subcommand("frontier", "Convex cost-accuracy frontier of a ledger");
  fr->add_option("ledger", ledger_path)->required();
  fr->add_option("sheet", sheet_path)->required();
  fr->add_option("--json", json_path, "Frontier JSON path (default stdout)");
  fr->add_option("--csv", csv_path, "Plot-data CSV path");
  auto* b = fr->add_option("--budget", budget, "Recommend under this mean cost per run");
  fr->add_option("--min-accuracy", min_accuracy, "Recommend the cheapest policy reaching this")
      ->excludes(b);
  fr->callback([&] {
    action = [&] {
      return cmd_frontier(ledger_path, sheet_path, json_path, csv_path, budget, min_accuracy, out);
    };
  });

  auto* opt = app.add_subcommand("optimize", "Bootstrap demos, search configs, pick a deployment");
  opt->add_option("config", config_path, "Eval config JSON with an optimizer block")->required();
  opt->add_option("-o,--out", out_path, "Report JSON path (default stdout)");
  opt->add_option("--ledger", opt_ledger_path, "Write the optimization ledger here");
  opt->callback([&] { action = [&] { return cmd_optimize(config_path, out_path, opt_ledger_path, out); }; });

  auto* li = app.add_subcommand("lint", "Check a benchmark manifest's holdout (exit 0/1/2)");
  li->add_option("manifest", manifest_path)->required();
  li->add_flag("--json", as_json, "JSON report");
  li->callback([&] { action = [&] { return cmd_lint(manifest_path, as_json, out); }; });

  auto* ex = app.add_subcommand("export", "Leaderboard JSON for the web UI");
  ex->add_option("ledger", ledger_path)->required();
  ex->add_option("sheet", sheet_path)->required();
  ex->add_option("-o,--out", out_path, "Output path (default stdout)");
  ex->callback([&] { action = [&] { return cmd_export(ledger_path, sheet_path, out_path, out); }; });

  auto* oc = app.add_subcommand("order-check", "Compare verdicts under given and reversed task order");
  oc->add_option("config", config_path)->required();
  oc->add_option("--strategy", strategy, "Only this strategy id");
  oc->callback([&] { action = [&] { return cmd_order_check(config_path, strategy, out); }; });

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "costeval: " << e.what() << "\n";
    return kExitUsage;
  }

  try {
    return action();
  } catch (const NoInput& e) {
    err << "costeval: " << e.what() << "\n";
    return kExitNoInput;
  } catch (const Error& e) {
    err << "costeval: " << e.what() << "\n";
    return exit_code(e);
  } catch (const std::exception& e) {
    err << "costeval: " << e.what() << "\n";
    return kExitData;
  }
}

}  // namespace costeval::cli
