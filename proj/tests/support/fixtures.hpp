#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "costeval/ledger.hpp"
#include "costeval/pricing.hpp"
#include "costeval/random.hpp"

namespace fixtures {

inline costeval::PriceSheet two_model_sheet() {
  using costeval::Decimal;
  costeval::PriceSheet sheet("USD", "2024-04-01");
  sheet.add("gpt-3.5-turbo", {Decimal::parse("0.0000005"), Decimal::parse("0.0000015")});
  sheet.add("gpt-4-turbo", {Decimal::parse("0.00001"), Decimal::parse("0.00003")});
  return sheet;
}

struct CallSpec {
  std::string model;
  std::uint64_t input = 0;
  std::uint64_t output = 0;
};

struct TaskSpec {
  std::string task_id;
  bool success = false;
  std::vector<CallSpec> calls;
};

inline costeval::RunRecord make_run(const std::string& strategy, std::uint32_t run_index,
                                    const std::vector<TaskSpec>& tasks) {
  costeval::RunRecord run;
  run.strategy_id = strategy;
  run.run_index = run_index;
  run.seed = 1000 + run_index;
  for (const auto& t : tasks) {
    costeval::TaskResult r;
    r.task_id = t.task_id;
    r.success = t.success;
    r.example_tests_passed = t.success;
    std::uint32_t attempt = 0;
    for (const auto& c : t.calls) {
      costeval::CallRecord call;
      call.model = c.model;
      call.usage = {c.input, c.output};
      call.attempt_index = attempt++;
      r.calls.push_back(call);
    }
    run.task_order.push_back(t.task_id);
    run.results.push_back(std::move(r));
  }
  return run;
}

// Random ledger over the two priced models, drawn from a counter-based stream.
inline costeval::EvalLedger random_ledger(std::uint64_t seed, std::size_t* call_count = nullptr) {
  using costeval::random::CounterRng;
  using costeval::random::KeyBuilder;
  const CounterRng rng(KeyBuilder().add(seed).add("random-ledger").hash());
  std::uint32_t draw = 0;
  auto below = [&](std::uint64_t bound) { return rng.below(draw++, bound); };
  const char* models[] = {"gpt-3.5-turbo", "gpt-4-turbo"};

  costeval::EvalLedger ledger;
  ledger.benchmark_id = "random";
  std::size_t calls = 0;
  const auto strategies = 1 + below(4);
  for (std::uint64_t s = 0; s < strategies; ++s) {
    const auto runs = 1 + below(3);
    for (std::uint32_t r = 0; r < runs; ++r) {
      std::vector<TaskSpec> tasks;
      const auto n_tasks = 1 + below(6);
      for (std::uint64_t t = 0; t < n_tasks; ++t) {
        TaskSpec task{"t" + std::to_string(t), below(2) == 1, {}};
        const auto n_calls = 1 + below(4);
        for (std::uint64_t c = 0; c < n_calls; ++c) {
          task.calls.push_back({models[below(2)], below(5000), below(2000)});
        }
        calls += n_calls;
        tasks.push_back(std::move(task));
      }
      ledger = costeval::append_run(ledger, make_run("s" + std::to_string(s), r, tasks));
    }
  }
  if (call_count != nullptr) *call_count = calls;
  return ledger;
}

// Fresh empty directory under the system temp dir.
inline std::filesystem::path temp_dir(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / ("costeval-test-" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace fixtures
