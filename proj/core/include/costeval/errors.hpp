#pragma once

#include <chrono>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace costeval {

/// Broad category of a failure; the CLI maps these onto exit codes.
enum class ErrorKind {
  data,       // malformed or inconsistent input data (exit 65)
  config,     // invalid configuration (exit 78)
  usage,      // caller violated a precondition (exit 64)
  transport,  // provider/network failure
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

class InvalidArgument : public Error {
 public:
  explicit InvalidArgument(const std::string& what)
      : Error(ErrorKind::usage, what) {}
};

class UnknownModel : public Error {
 public:
  explicit UnknownModel(std::vector<std::string> models)
      : Error(ErrorKind::data, describe(models)), models_(std::move(models)) {}

  const std::vector<std::string>& models() const noexcept { return models_; }

 private:
  static std::string describe(const std::vector<std::string>& models) {
    std::string out = "unknown model(s):";
    for (const auto& m : models) out += " " + m;
    return out;
  }

  std::vector<std::string> models_;
};

class CurrencyMismatch : public Error {
 public:
  CurrencyMismatch(const std::string& lhs, const std::string& rhs)
      : Error(ErrorKind::data,
              "currency mismatch: " + lhs + " vs " + rhs) {}
};

class SchemaError : public Error {
 public:
  /// line is 1-based; 0 means "not tied to a line".
  SchemaError(std::size_t line, const std::string& what)
      : Error(ErrorKind::data, line == 0 ? what
                                         : "line " + std::to_string(line) +
                                               ": " + what),
        line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

class VersionError : public Error {
 public:
  explicit VersionError(long long version)
      : Error(ErrorKind::data,
              "unsupported schema_version " + std::to_string(version)),
        version_(version) {}

  long long version() const noexcept { return version_; }

 private:
  long long version_;
};

class DuplicateRun : public Error {
 public:
  DuplicateRun(const std::string& strategy_id, unsigned run_index)
      : Error(ErrorKind::data, "duplicate run " + strategy_id + "#" +
                                   std::to_string(run_index)) {}
};

class UnknownStrategy : public Error {
 public:
  explicit UnknownStrategy(const std::string& id)
      : Error(ErrorKind::data, "unknown strategy: " + id) {}
};

class InsufficientData : public Error {
 public:
  explicit InsufficientData(const std::string& what)
      : Error(ErrorKind::data, what) {}
};

class NonFinite : public Error {
 public:
  NonFinite() : Error(ErrorKind::data, "non-finite value in input") {}
};

class EmptyInput : public Error {
 public:
  explicit EmptyInput(const std::string& what = "empty input")
      : Error(ErrorKind::data, what) {}
};

class Infeasible : public Error {
 public:
  explicit Infeasible(const std::string& what)
      : Error(ErrorKind::data, what) {}
};

class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& what)
      : Error(ErrorKind::config, what) {}
};

/// Retryable; carries the provider's advised wait.
class RateLimited : public Error {
 public:
  explicit RateLimited(std::chrono::milliseconds retry_after,
                       const std::string& what = "rate limited")
      : Error(ErrorKind::transport, what), retry_after_(retry_after) {}

  std::chrono::milliseconds retry_after() const noexcept {
    return retry_after_;
  }

 private:
  std::chrono::milliseconds retry_after_;
};

class TransportError : public Error {
 public:
  explicit TransportError(const std::string& what)
      : Error(ErrorKind::transport, what) {}
};

class AuthError : public Error {
 public:
  explicit AuthError(const std::string& what)
      : Error(ErrorKind::transport, what) {}
};

}  // namespace costeval
