#pragma once

#include <chrono>
#include <cstdint>
#include <functional>
#include <map>
#include <string>

#include <nlohmann/json.hpp>

#include "costeval/provider.hpp"

namespace costeval {

/// Where and how to reach a chat-completion style endpoint. The credential
/// is named by environment variable, never stored.
struct EndpointConfig {
  std::string base_url;                       // e.g. "http://127.0.0.1:8080"
  std::string path = "/v1/chat/completions";
  std::map<std::string, std::string> models;  // model id -> remote model name
  std::string credential_env;                 // empty: no Authorization header
  std::uint32_t retry_budget = 3;             // retries after the first attempt
  std::chrono::milliseconds backoff_base{500};
  std::chrono::milliseconds timeout{60'000};

  static EndpointConfig from_json(const nlohmann::ordered_json& doc);
  nlohmann::ordered_json to_json() const;
  static EndpointConfig load(const std::string& path);
};

/// Request body for the wire format:
/// {"model", "messages": [{"role": "user", "content"}], "temperature",
///  "max_tokens", "seed"}.
nlohmann::ordered_json make_wire_request(const CompletionRequest& request,
                                         const std::string& remote_model);

/// Reads {"choices": [{"message": {"content"}}], "usage": {"prompt_tokens",
/// "completion_tokens"}}. Throws TransportError on a malformed body.
CompletionResponse parse_wire_response(const std::string& body);

/// One logical completion with exponential backoff on HTTP 429 (honouring
/// Retry-After seconds when larger). Waits are included in the latency and
/// the number of HTTP attempts in `attempts`.
/// Throws UnknownModel, AuthError (401/403), RateLimited (budget exhausted),
/// TransportError.
CompletionResponse http_complete(const CompletionRequest& request,
                                 const EndpointConfig& endpoint);

class HttpProvider final : public Provider {
 public:
  explicit HttpProvider(EndpointConfig endpoint) : endpoint_(std::move(endpoint)) {}

  CompletionResponse complete(const CompletionRequest& request) override {
    return http_complete(request, endpoint_);
  }
  bool knows_model(const std::string& model) const override {
    return endpoint_.models.count(model) != 0;
  }

 private:
  EndpointConfig endpoint_;
};

}  // namespace costeval
