#include "costeval/ledger.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <initializer_list>
#include <sstream>

#include "costeval/errors.hpp"
#include "costeval/json_util.hpp"

namespace costeval {

using nlohmann::ordered_json;

std::string to_string(CallPurpose purpose) {
  switch (purpose) {
    case CallPurpose::generate: return "generate";
    case CallPurpose::debug: return "debug";
    case CallPurpose::reflect: return "reflect";
    case CallPurpose::other: return "other";
  }
  return "other";
}

CallPurpose parse_call_purpose(const std::string& text) {
  if (text == "generate") return CallPurpose::generate;
  if (text == "debug") return CallPurpose::debug;
  if (text == "reflect") return CallPurpose::reflect;
  if (text == "other") return CallPurpose::other;
  throw InvalidArgument("unknown call purpose: " + text);
}

TokenUsage TaskResult::usage() const {
  TokenUsage total;
  for (const auto& c : calls) total += c.usage;
  return total;
}

const RunRecord* EvalLedger::find_run(const std::string& strategy_id,
                                      std::uint32_t run_index) const {
  for (const auto& r : runs) {
    if (r.strategy_id == strategy_id && r.run_index == run_index) return &r;
  }
  return nullptr;
}

std::vector<std::string> EvalLedger::strategy_ids() const {
  std::vector<std::string> ids;
  for (const auto& r : runs) {
    if (std::find(ids.begin(), ids.end(), r.strategy_id) == ids.end()) {
      ids.push_back(r.strategy_id);
    }
  }
  return ids;
}

std::set<std::string> EvalLedger::models() const {
  std::set<std::string> out;
  for (const auto& r : runs)
    for (const auto& t : r.results)
      for (const auto& c : t.calls) out.insert(c.model);
  return out;
}

void validate_run(const RunRecord& run, std::size_t line) {
  if (run.strategy_id.empty()) throw SchemaError(line, "empty strategy_id");
  std::vector<std::string> ids;
  ids.reserve(run.results.size());
  for (const auto& t : run.results) {
    if (t.task_id.empty()) throw SchemaError(line, "empty task_id");
    if (t.calls.empty()) {
      throw SchemaError(line, "task " + t.task_id + " has no calls");
    }
    if (t.wall_time_ms < 0) throw SchemaError(line, "negative wall_time_ms");
    for (const auto& c : t.calls) {
      if (c.model.empty()) throw SchemaError(line, "call with empty model");
      if (c.latency_ms < 0) throw SchemaError(line, "negative latency_ms");
      if (!std::isfinite(c.temperature) || c.temperature < 0.0 ||
          c.temperature > 2.0) {
        throw SchemaError(line, "temperature out of range");
      }
    }
    ids.push_back(t.task_id);
  }
  std::vector<std::string> order = run.task_order;
  std::sort(ids.begin(), ids.end());
  std::sort(order.begin(), order.end());
  if (std::adjacent_find(ids.begin(), ids.end()) != ids.end()) {
    throw SchemaError(line, "duplicate task_id in run " + run.strategy_id);
  }
  if (ids != order) {
    throw SchemaError(line, "task_order is not a permutation of the results");
  }
}

EvalLedger append_run(const EvalLedger& ledger, RunRecord run) {
  if (run.strategy_id.empty()) throw InvalidArgument("empty strategy_id");
  if (ledger.find_run(run.strategy_id, run.run_index) != nullptr) {
    throw DuplicateRun(run.strategy_id, run.run_index);
  }
  try {
    validate_run(run);
  } catch (const SchemaError& e) {
    throw InvalidArgument(e.what());
  }
  EvalLedger out = ledger;
  out.runs.push_back(std::move(run));
  return out;
}

namespace {

ordered_json extras_of(const ordered_json& obj,
                       std::initializer_list<const char*> known) {
  ordered_json extra = ordered_json::object();
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    bool is_known = false;
    for (const char* k : known) {
      if (it.key() == k) {
        is_known = true;
        break;
      }
    }
    if (!is_known) extra[it.key()] = it.value();
  }
  return extra;
}

void merge_extra(ordered_json& out, const ordered_json& extra) {
  for (auto it = extra.begin(); it != extra.end(); ++it) {
    if (!out.contains(it.key())) out[it.key()] = it.value();
  }
}

ordered_json call_to_json(const CallRecord& c) {
  ordered_json j;
  j["model"] = c.model;
  j["input_tokens"] = c.usage.input_tokens;
  j["output_tokens"] = c.usage.output_tokens;
  j["temperature"] = c.temperature;
  j["latency_ms"] = c.latency_ms;
  j["attempt_index"] = c.attempt_index;
  j["purpose"] = to_string(c.purpose);
  if (c.transport_attempts != 1) j["transport_attempts"] = c.transport_attempts;
  if (!c.error.empty()) j["error"] = c.error;
  merge_extra(j, c.extra);
  return j;
}

ordered_json task_to_json(const TaskResult& t) {
  ordered_json j;
  j["kind"] = "task";
  j["task_id"] = t.task_id;
  j["success"] = t.success;
  j["example_tests_passed"] = t.example_tests_passed;
  j["wall_time_ms"] = t.wall_time_ms;
  if (!t.error.empty()) j["error"] = t.error;
  ordered_json calls = ordered_json::array();
  for (const auto& c : t.calls) calls.push_back(call_to_json(c));
  j["calls"] = std::move(calls);
  merge_extra(j, t.extra);
  return j;
}

ordered_json run_header_to_json(const RunRecord& r) {
  ordered_json j;
  j["kind"] = "run";
  j["strategy_id"] = r.strategy_id;
  j["run_index"] = r.run_index;
  j["seed"] = r.seed;
  j["task_order"] = r.task_order;
  j["n_results"] = r.results.size();
  merge_extra(j, r.extra);
  return j;
}

ordered_json preamble_to_json(const EvalLedger& l) {
  ordered_json j;
  j["kind"] = "ledger";
  j["schema_version"] = l.schema_version;
  j["benchmark_id"] = l.benchmark_id;
  merge_extra(j, l.extra);
  return j;
}

std::int64_t require_int(const ordered_json& obj, const char* key,
                         std::size_t line) {
  const auto& v = json_util::require(obj, key, line);
  if (!v.is_number_integer()) {
    throw SchemaError(line, std::string("field \"") + key + "\" must be an integer");
  }
  return v.get<std::int64_t>();
}

std::uint32_t require_u32(const ordered_json& obj, const char* key,
                          std::size_t line) {
  const auto v = json_util::require_uint(obj, key, line);
  if (v > UINT32_MAX) {
    throw SchemaError(line, std::string("field \"") + key + "\" out of range");
  }
  return static_cast<std::uint32_t>(v);
}

CallRecord call_from_json(const ordered_json& j, std::size_t line) {
  using namespace json_util;
  CallRecord c;
  c.model = require_string(j, "model", line);
  c.usage.input_tokens = require_uint(j, "input_tokens", line);
  c.usage.output_tokens = require_uint(j, "output_tokens", line);
  c.temperature = require_number(j, "temperature", line);
  c.latency_ms = require_int(j, "latency_ms", line);
  c.attempt_index = require_u32(j, "attempt_index", line);
  try {
    c.purpose = parse_call_purpose(require_string(j, "purpose", line));
  } catch (const InvalidArgument& e) {
    throw SchemaError(line, e.what());
  }
  if (j.contains("transport_attempts")) {
    c.transport_attempts = require_u32(j, "transport_attempts", line);
  }
  if (j.contains("error")) c.error = require_string(j, "error", line);
  c.extra = extras_of(j, {"model", "input_tokens", "output_tokens", "temperature",
                          "latency_ms", "attempt_index", "purpose",
                          "transport_attempts", "error"});
  return c;
}

TaskResult task_from_json(const ordered_json& j, std::size_t line) {
  using namespace json_util;
  TaskResult t;
  t.task_id = require_string(j, "task_id", line);
  t.success = require_bool(j, "success", line);
  t.example_tests_passed = require_bool(j, "example_tests_passed", line);
  t.wall_time_ms = require_int(j, "wall_time_ms", line);
  if (j.contains("error")) t.error = require_string(j, "error", line);
  const auto& calls = require(j, "calls", line);
  if (!calls.is_array()) throw SchemaError(line, "\"calls\" must be an array");
  for (const auto& c : calls) t.calls.push_back(call_from_json(c, line));
  t.extra = extras_of(j, {"kind", "task_id", "success", "example_tests_passed",
                          "wall_time_ms", "error", "calls"});
  return t;
}

}  // namespace

std::string run_to_jsonl(const RunRecord& run) {
  std::string out = run_header_to_json(run).dump() + "\n";
  for (const auto& t : run.results) out += task_to_json(t).dump() + "\n";
  return out;
}

std::string to_jsonl(const EvalLedger& ledger) {
  std::string out = preamble_to_json(ledger).dump() + "\n";
  for (const auto& r : ledger.runs) out += run_to_jsonl(r);
  return out;
}

EvalLedger from_jsonl(const std::string& text) {
  using namespace json_util;
  EvalLedger ledger;
  bool have_preamble = false;
  RunRecord* open_run = nullptr;
  std::size_t expected_tasks = 0;
  std::size_t run_line = 0;

  std::istringstream in(text);
  std::string raw;
  std::size_t line_no = 0;
  auto close_run = [&]() {
    if (open_run == nullptr) return;
    if (expected_tasks != 0) {
      throw SchemaError(run_line, "run declares more results than follow it");
    }
    validate_run(*open_run, run_line);
    open_run = nullptr;
  };

  while (std::getline(in, raw)) {
    ++line_no;
    if (raw.find_first_not_of(" \t\r") == std::string::npos) continue;
    const ordered_json j = parse_strict(raw, line_no);
    if (!j.is_object()) throw SchemaError(line_no, "record must be an object");
    const std::string kind = require_string(j, "kind", line_no);

    if (!have_preamble) {
      if (kind != "ledger") {
        throw SchemaError(line_no, "first record must be the ledger preamble");
      }
      const auto& v = require(j, "schema_version", line_no);
      if (!v.is_number_integer()) {
        throw SchemaError(line_no, "schema_version must be an integer");
      }
      if (v.get<long long>() != kLedgerSchemaVersion) {
        throw VersionError(v.get<long long>());
      }
      ledger.benchmark_id = require_string(j, "benchmark_id", line_no);
      ledger.extra = extras_of(j, {"kind", "schema_version", "benchmark_id"});
      have_preamble = true;
      continue;
    }

    if (kind == "run") {
      close_run();
      RunRecord r;
      r.strategy_id = require_string(j, "strategy_id", line_no);
      r.run_index = require_u32(j, "run_index", line_no);
      r.seed = require_uint(j, "seed", line_no);
      const auto& order = require(j, "task_order", line_no);
      if (!order.is_array()) throw SchemaError(line_no, "task_order must be an array");
      for (const auto& id : order) {
        if (!id.is_string()) throw SchemaError(line_no, "task ids must be strings");
        r.task_order.push_back(id.get<std::string>());
      }
      expected_tasks = require_uint(j, "n_results", line_no);
      r.extra = extras_of(j, {"kind", "strategy_id", "run_index", "seed",
                              "task_order", "n_results"});
      if (ledger.find_run(r.strategy_id, r.run_index) != nullptr) {
        throw SchemaError(line_no, "duplicate run " + r.strategy_id + "#" +
                                       std::to_string(r.run_index));
      }
      ledger.runs.push_back(std::move(r));
      open_run = &ledger.runs.back();
      run_line = line_no;
    } else if (kind == "task") {
      if (open_run == nullptr || expected_tasks == 0) {
        throw SchemaError(line_no, "task record outside of a run");
      }
      open_run->results.push_back(task_from_json(j, line_no));
      --expected_tasks;
    } else {
      throw SchemaError(line_no, "unknown record kind \"" + kind + "\"");
    }
  }
  if (!have_preamble) throw SchemaError(1, "missing ledger preamble");
  close_run();
  return ledger;
}

EvalLedger load_ledger(const std::string& path) {
  return from_jsonl(json_util::read_file(path));
}

void save_ledger(const EvalLedger& ledger, const std::string& path) {
  json_util::write_file(path, to_jsonl(ledger));
}

LedgerWriter::LedgerWriter(const std::string& path,
                           const std::string& benchmark_id)
    : path_(path) {
  std::error_code ec;
  const bool fresh = !std::filesystem::exists(path, ec) ||
                     std::filesystem::file_size(path, ec) == 0;
  if (fresh) {
    EvalLedger empty;
    empty.benchmark_id = benchmark_id;
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw ConfigError("cannot create ledger " + path);
    out << to_jsonl(empty);
  } else {
    const EvalLedger existing = load_ledger(path);
    if (existing.benchmark_id != benchmark_id) {
      throw ConfigError("ledger " + path + " belongs to benchmark " +
                        existing.benchmark_id);
    }
    for (const auto& r : existing.runs) seen_.emplace(r.strategy_id, r.run_index);
  }
}

void LedgerWriter::append(const RunRecord& run) {
  if (seen_.count({run.strategy_id, run.run_index}) != 0) {
    throw DuplicateRun(run.strategy_id, run.run_index);
  }
  validate_run(run);
  std::ofstream out(path_, std::ios::binary | std::ios::app);
  if (!out) throw ConfigError("cannot append to ledger " + path_);
  const std::string chunk = run_to_jsonl(run);
  out.write(chunk.data(), static_cast<std::streamsize>(chunk.size()));
  out.flush();
  if (!out) throw ConfigError("short write to ledger " + path_);
  seen_.emplace(run.strategy_id, run.run_index);
}

std::vector<RunSummary> summarize(const EvalLedger& ledger,
                                  const std::string& strategy_id) {
  std::vector<RunSummary> out;
  for (const auto& run : ledger.runs) {
    if (run.strategy_id != strategy_id) continue;
    RunSummary s;
    s.run_index = run.run_index;
    s.tasks = run.results.size();
    for (const auto& t : run.results) {
      if (t.success) ++s.successes;
      s.wall_time_ms += t.wall_time_ms;
      for (const auto& c : t.calls) {
        s.usage += c.usage;
        s.usage_by_model[c.model] += c.usage;
      }
    }
    s.accuracy = s.tasks == 0 ? 0.0
                              : static_cast<double>(s.successes) /
                                    static_cast<double>(s.tasks);
    out.push_back(std::move(s));
  }
  if (out.empty()) throw UnknownStrategy(strategy_id);
  return out;
}

namespace {

bool call_replay_equal(const CallRecord& a, const CallRecord& b) {
  return a.model == b.model && a.usage == b.usage &&
         a.temperature == b.temperature && a.attempt_index == b.attempt_index &&
         a.purpose == b.purpose && a.transport_attempts == b.transport_attempts &&
         a.error == b.error && a.extra == b.extra;
}

bool task_replay_equal(const TaskResult& a, const TaskResult& b) {
  return a.task_id == b.task_id && a.success == b.success &&
         a.example_tests_passed == b.example_tests_passed && a.error == b.error &&
         a.extra == b.extra &&
         std::equal(a.calls.begin(), a.calls.end(), b.calls.begin(), b.calls.end(),
                    call_replay_equal);
}

}  // namespace

bool replay_equal(const RunRecord& a, const RunRecord& b) {
  return a.strategy_id == b.strategy_id && a.run_index == b.run_index &&
         a.seed == b.seed && a.task_order == b.task_order && a.extra == b.extra &&
         std::equal(a.results.begin(), a.results.end(), b.results.begin(),
                    b.results.end(), task_replay_equal);
}

bool replay_equal(const EvalLedger& a, const EvalLedger& b) {
  return a.benchmark_id == b.benchmark_id && a.schema_version == b.schema_version &&
         std::equal(a.runs.begin(), a.runs.end(), b.runs.begin(), b.runs.end(),
                    [](const RunRecord& x, const RunRecord& y) {
                      return replay_equal(x, y);
                    });
}

}  // namespace costeval
