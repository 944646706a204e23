#include "costeval/http_provider.hpp"

#include <algorithm>
#include <cstdlib>
#include <thread>

#include <httplib.h>

#include "costeval/errors.hpp"
#include "costeval/json_util.hpp"

namespace costeval {

using nlohmann::ordered_json;

EndpointConfig EndpointConfig::from_json(const ordered_json& doc) {
  using namespace json_util;
  EndpointConfig c;
  c.base_url = require_string(doc, "base_url");
  if (doc.contains("path")) c.path = require_string(doc, "path");
  const auto& models = require(doc, "models");
  if (!models.is_object()) throw SchemaError(0, "\"models\" must be an object");
  for (const auto& [id, remote] : models.items()) {
    if (!remote.is_string()) throw SchemaError(0, "model mapping must be strings");
    c.models[id] = remote.get<std::string>();
  }
  if (doc.contains("credential_env")) c.credential_env = require_string(doc, "credential_env");
  if (doc.contains("retry_budget")) {
    c.retry_budget = static_cast<std::uint32_t>(require_uint(doc, "retry_budget"));
  }
  if (doc.contains("backoff_base_ms")) {
    c.backoff_base = std::chrono::milliseconds(require_uint(doc, "backoff_base_ms"));
  }
  if (doc.contains("timeout_ms")) {
    c.timeout = std::chrono::milliseconds(require_uint(doc, "timeout_ms"));
  }
  return c;
}

ordered_json EndpointConfig::to_json() const {
  ordered_json j;
  j["base_url"] = base_url;
  j["path"] = path;
  j["models"] = models;
  j["credential_env"] = credential_env;
  j["retry_budget"] = retry_budget;
  j["backoff_base_ms"] = backoff_base.count();
  j["timeout_ms"] = timeout.count();
  return j;
}

EndpointConfig EndpointConfig::load(const std::string& path) {
  return from_json(json_util::parse_strict(json_util::read_file(path)));
}

ordered_json make_wire_request(const CompletionRequest& request,
                               const std::string& remote_model) {
  ordered_json j;
  j["model"] = remote_model;
  j["messages"] = ordered_json::array(
      {ordered_json{{"role", "user"}, {"content", request.prompt}}});
  j["temperature"] = request.temperature;
  j["max_tokens"] = request.max_output_tokens;
  j["seed"] = request.seed_material.run_seed;
  return j;
}

CompletionResponse parse_wire_response(const std::string& body) {
  try {
    const ordered_json j = ordered_json::parse(body);
    CompletionResponse r;
    const auto& choices = j.at("choices");
    if (!choices.is_array() || choices.empty()) {
      throw TransportError("response has no choices");
    }
    r.text = choices.at(0).at("message").at("content").get<std::string>();
    const auto& usage = j.at("usage");
    r.usage.input_tokens = usage.at("prompt_tokens").get<std::uint64_t>();
    r.usage.output_tokens = usage.at("completion_tokens").get<std::uint64_t>();
    return r;
  } catch (const ordered_json::exception& e) {
    throw TransportError(std::string("malformed completion response: ") + e.what());
  }
}

CompletionResponse http_complete(const CompletionRequest& request,
                                 const EndpointConfig& endpoint) {
  request.validate();
  auto model = endpoint.models.find(request.model);
  if (model == endpoint.models.end()) throw UnknownModel({request.model});

  httplib::Headers headers;
  if (!endpoint.credential_env.empty()) {
    const char* secret = std::getenv(endpoint.credential_env.c_str());
    if (secret == nullptr || *secret == '\0') {
      throw AuthError("credential variable " + endpoint.credential_env + " is not set");
    }
    headers.emplace("Authorization", std::string("Bearer ") + secret);
  }

  httplib::Client client(endpoint.base_url);
  const auto secs = std::chrono::duration_cast<std::chrono::seconds>(endpoint.timeout);
  client.set_connection_timeout(secs.count(), 0);
  client.set_read_timeout(secs.count(), 0);
  const std::string body = make_wire_request(request, model->second).dump();

  const auto started = std::chrono::steady_clock::now();
  std::chrono::milliseconds advised{0};
  for (std::uint32_t attempt = 1;; ++attempt) {
    auto res = client.Post(endpoint.path, headers, body, "application/json");
    if (!res) {
      throw TransportError("request to " + endpoint.base_url + " failed: " +
                           httplib::to_string(res.error()));
    }
    if (res->status == 429) {
      std::chrono::milliseconds wait = endpoint.backoff_base * (1LL << std::min<std::uint32_t>(attempt - 1, 20));
      if (res->has_header("Retry-After")) {
        try {
          const auto ra = std::chrono::seconds(std::stoll(res->get_header_value("Retry-After")));
          wait = std::max<std::chrono::milliseconds>(wait, ra);
        } catch (const std::exception&) {
          // non-numeric Retry-After (HTTP date); keep the computed backoff
        }
      }
      advised = wait;
      if (attempt > endpoint.retry_budget) {
        throw RateLimited(advised, "rate limited after " + std::to_string(attempt) +
                                       " attempts");
      }
      std::this_thread::sleep_for(wait);
      continue;
    }
    if (res->status == 401 || res->status == 403) {
      throw AuthError("endpoint rejected credentials (HTTP " +
                      std::to_string(res->status) + ")");
    }
    if (res->status < 200 || res->status >= 300) {
      throw TransportError("endpoint returned HTTP " + std::to_string(res->status));
    }
    CompletionResponse out = parse_wire_response(res->body);
    out.attempts = attempt;
    out.latency = std::chrono::duration_cast<std::chrono::milliseconds>(
        std::chrono::steady_clock::now() - started);
    return out;
  }
}

}  // namespace costeval
