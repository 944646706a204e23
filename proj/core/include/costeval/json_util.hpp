#pragma once

#include <cstddef>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

namespace costeval::json_util {

/// Parses a JSON document and rejects duplicate object keys. Throws
/// SchemaError carrying `line` (0 when parsing a whole file).
nlohmann::ordered_json parse_strict(std::string_view text,
                                    std::size_t line = 0);

std::string read_file(const std::string& path);
/// Writes via a temporary file and rename.
void write_file(const std::string& path, std::string_view contents);

/// Field accessors that raise SchemaError with the field name.
const nlohmann::ordered_json& require(const nlohmann::ordered_json& obj,
                                      const char* key, std::size_t line = 0);
std::string require_string(const nlohmann::ordered_json& obj, const char* key,
                           std::size_t line = 0);
std::uint64_t require_uint(const nlohmann::ordered_json& obj, const char* key,
                           std::size_t line = 0);
double require_number(const nlohmann::ordered_json& obj, const char* key,
                      std::size_t line = 0);
bool require_bool(const nlohmann::ordered_json& obj, const char* key,
                  std::size_t line = 0);

}  // namespace costeval::json_util
