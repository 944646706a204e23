#pragma once

#include <cstdint>
#include <fstream>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "costeval/pricing.hpp"

namespace costeval {

inline constexpr int kLedgerSchemaVersion = 1;

enum class CallPurpose { generate, debug, reflect, other };

std::string to_string(CallPurpose purpose);
CallPurpose parse_call_purpose(const std::string& text);

/// One model invocation. Dollar amounts are never stored: token counts and
/// model ids are enough to price the call under any sheet.
struct CallRecord {
  std::string model;
  TokenUsage usage;
  double temperature = 0.0;
  std::int64_t latency_ms = 0;
  std::uint32_t attempt_index = 0;
  CallPurpose purpose = CallPurpose::generate;
  /// Transport-level attempts behind this logical call (HTTP retries).
  std::uint32_t transport_attempts = 1;
  /// Empty on success; otherwise e.g. "rate_limited".
  std::string error;
  /// Unknown fields read from disk, written back verbatim.
  nlohmann::ordered_json extra = nlohmann::ordered_json::object();

  friend bool operator==(const CallRecord&, const CallRecord&) = default;
};

struct TaskResult {
  std::string task_id;
  bool success = false;
  bool example_tests_passed = false;
  std::vector<CallRecord> calls;
  std::int64_t wall_time_ms = 0;
  std::string error;
  nlohmann::ordered_json extra = nlohmann::ordered_json::object();

  TokenUsage usage() const;

  friend bool operator==(const TaskResult&, const TaskResult&) = default;
};

struct RunRecord {
  std::string strategy_id;
  std::uint32_t run_index = 0;
  std::uint64_t seed = 0;
  std::vector<std::string> task_order;
  std::vector<TaskResult> results;
  nlohmann::ordered_json extra = nlohmann::ordered_json::object();

  friend bool operator==(const RunRecord&, const RunRecord&) = default;
};

/// Append-only record of evaluation runs.
struct EvalLedger {
  std::string benchmark_id;
  int schema_version = kLedgerSchemaVersion;
  std::vector<RunRecord> runs;
  nlohmann::ordered_json extra = nlohmann::ordered_json::object();

  const RunRecord* find_run(const std::string& strategy_id,
                            std::uint32_t run_index) const;
  /// Strategy ids in first-appearance order.
  std::vector<std::string> strategy_ids() const;
  /// Every model id referenced by any call.
  std::set<std::string> models() const;

  friend bool operator==(const EvalLedger&, const EvalLedger&) = default;
};

/// Returns a new ledger with `run` appended. Throws DuplicateRun or
/// InvalidArgument (empty strategy id, task_order not a permutation).
EvalLedger append_run(const EvalLedger& ledger, RunRecord run);

/// Structural check of a single run; throws SchemaError.
void validate_run(const RunRecord& run, std::size_t line = 0);

/// JSONL encoding: a preamble line, then for every run a header line
/// followed by one line per task result.
std::string to_jsonl(const EvalLedger& ledger);
std::string run_to_jsonl(const RunRecord& run);
EvalLedger from_jsonl(const std::string& text);

EvalLedger load_ledger(const std::string& path);
void save_ledger(const EvalLedger& ledger, const std::string& path);

/// Single writer appending runs to a JSONL file. Existing bytes are never
/// rewritten; the preamble is written only when the file is new or empty.
class LedgerWriter {
 public:
  LedgerWriter(const std::string& path, const std::string& benchmark_id);

  /// Throws DuplicateRun if the (strategy, run_index) pair already exists.
  void append(const RunRecord& run);

  const std::string& path() const { return path_; }

 private:
  std::string path_;
  std::set<std::pair<std::string, std::uint32_t>> seen_;
};

/// Per-run aggregate for one strategy.
struct RunSummary {
  std::uint32_t run_index = 0;
  std::uint64_t tasks = 0;
  std::uint64_t successes = 0;
  double accuracy = 0.0;
  TokenUsage usage;
  std::map<std::string, TokenUsage> usage_by_model;
  std::int64_t wall_time_ms = 0;
};

/// One entry per run of `strategy_id`, in ledger order. Throws
/// UnknownStrategy.
std::vector<RunSummary> summarize(const EvalLedger& ledger,
                                  const std::string& strategy_id);

/// Field-by-field equality ignoring latency and wall time.
bool replay_equal(const RunRecord& a, const RunRecord& b);
bool replay_equal(const EvalLedger& a, const EvalLedger& b);

}  // namespace costeval
