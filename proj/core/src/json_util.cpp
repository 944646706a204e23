#include "costeval/json_util.hpp"

#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>
#include <vector>

#include "costeval/errors.hpp"

namespace costeval::json_util {

using nlohmann::ordered_json;

ordered_json parse_strict(std::string_view text, std::size_t line) {
  std::vector<std::set<std::string>> keys;
  std::string duplicate;
  ordered_json::parser_callback_t cb =
      [&](int, ordered_json::parse_event_t event, ordered_json& parsed) {
        switch (event) {
          case ordered_json::parse_event_t::object_start:
            keys.emplace_back();
            break;
          case ordered_json::parse_event_t::object_end:
            if (!keys.empty()) keys.pop_back();
            break;
          case ordered_json::parse_event_t::key:
            if (!keys.empty() && parsed.is_string() &&
                !keys.back().insert(parsed.get<std::string>()).second &&
                duplicate.empty()) {
              duplicate = parsed.get<std::string>();
            }
            break;
          default:
            break;
        }
        return true;
      };
  ordered_json doc;
  try {
    doc = ordered_json::parse(text.begin(), text.end(), cb);
  } catch (const ordered_json::parse_error& e) {
    throw SchemaError(line, std::string("malformed JSON: ") + e.what());
  }
  if (!duplicate.empty()) {
    throw SchemaError(line, "duplicate key \"" + duplicate + "\"");
  }
  return doc;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, std::string_view contents) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw ConfigError("cannot write " + tmp);
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    if (!out) throw ConfigError("short write to " + tmp);
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0) {
    throw ConfigError("cannot rename " + tmp + " to " + path);
  }
}

const ordered_json& require(const ordered_json& obj, const char* key,
                            std::size_t line) {
  if (!obj.is_object()) throw SchemaError(line, "expected a JSON object");
  auto it = obj.find(key);
  if (it == obj.end()) {
    throw SchemaError(line, std::string("missing field \"") + key + "\"");
  }
  return *it;
}

std::string require_string(const ordered_json& obj, const char* key,
                           std::size_t line) {
  const auto& v = require(obj, key, line);
  if (!v.is_string()) {
    throw SchemaError(line, std::string("field \"") + key + "\" must be a string");
  }
  return v.get<std::string>();
}

std::uint64_t require_uint(const ordered_json& obj, const char* key,
                           std::size_t line) {
  const auto& v = require(obj, key, line);
  const bool non_negative_signed = v.is_number_integer() && v.get<std::int64_t>() >= 0;
  if (!v.is_number_unsigned() && !non_negative_signed) {
    throw SchemaError(line, std::string("field \"") + key +
                                "\" must be a non-negative integer");
  }
  return v.get<std::uint64_t>();
}

double require_number(const ordered_json& obj, const char* key,
                      std::size_t line) {
  const auto& v = require(obj, key, line);
  if (!v.is_number()) {
    throw SchemaError(line, std::string("field \"") + key + "\" must be a number");
  }
  return v.get<double>();
}

bool require_bool(const ordered_json& obj, const char* key, std::size_t line) {
  const auto& v = require(obj, key, line);
  if (!v.is_boolean()) {
    throw SchemaError(line, std::string("field \"") + key + "\" must be a boolean");
  }
  return v.get<bool>();
}

}  // namespace costeval::json_util
