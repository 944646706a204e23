#include "costeval/http_provider.hpp"

#include <atomic>
#include <cstdlib>
#include <thread>

#include <gtest/gtest.h>
#include <httplib.h>

#include "costeval/errors.hpp"

namespace costeval {
namespace {

// Local endpoint speaking the chat-completion wire format.
class StubServer {
 public:
  explicit StubServer(std::function<void(const httplib::Request&, httplib::Response&)> handler) {
    server_.Post("/v1/chat/completions", std::move(handler));
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }
  ~StubServer() {
    server_.stop();
    thread_.join();
  }

  EndpointConfig endpoint() const {
    EndpointConfig e;
    e.base_url = "http://127.0.0.1:" + std::to_string(port_);
    e.models = {{"gpt-4-turbo", "remote-gpt-4"}};
    e.backoff_base = std::chrono::milliseconds(1);
    e.timeout = std::chrono::milliseconds(5000);
    return e;
  }

 private:
  httplib::Server server_;
  int port_ = 0;
  std::thread thread_;
};

const char* kOkBody =
    R"({"choices":[{"message":{"role":"assistant","content":"def f(): pass"}}],)"
    R"("usage":{"prompt_tokens":12,"completion_tokens":7}})";

CompletionRequest request() {
  CompletionRequest r;
  r.model = "gpt-4-turbo";
  r.prompt = "write f";
  r.temperature = 0.2;
  r.max_output_tokens = 64;
  r.seed_material = {5, "t", 0};
  return r;
}

TEST(HttpProvider, RetriesRateLimitsThenSucceeds) {
  std::atomic<int> hits{0};
  std::string seen_body;
  StubServer server([&](const httplib::Request& req, httplib::Response& res) {
    if (++hits <= 2) {
      res.status = 429;
      res.set_content("slow down", "text/plain");
      return;
    }
    seen_body = req.body;
    res.set_content(kOkBody, "application/json");
  });
  HttpProvider provider(server.endpoint());
  const auto r = provider.complete(request());
  EXPECT_EQ(hits.load(), 3);
  EXPECT_EQ(r.attempts, 3u);
  EXPECT_EQ(r.text, "def f(): pass");
  EXPECT_EQ(r.usage, (TokenUsage{12, 7}));
  const auto body = nlohmann::json::parse(seen_body);
  EXPECT_EQ(body["model"], "remote-gpt-4");
  EXPECT_EQ(body["messages"][0]["content"], "write f");
  EXPECT_EQ(body["max_tokens"], 64);
}

TEST(HttpProvider, RateLimitBudgetExhausted) {
  StubServer server([](const httplib::Request&, httplib::Response& res) { res.status = 429; });
  auto endpoint = server.endpoint();
  endpoint.retry_budget = 1;
  EXPECT_THROW(http_complete(request(), endpoint), RateLimited);
}

TEST(HttpProvider, UnauthorizedIsAuthError) {
  StubServer server([](const httplib::Request&, httplib::Response& res) { res.status = 401; });
  EXPECT_THROW(http_complete(request(), server.endpoint()), AuthError);
}

TEST(HttpProvider, ServerErrorIsTransportError) {
  StubServer server([](const httplib::Request&, httplib::Response& res) { res.status = 503; });
  EXPECT_THROW(http_complete(request(), server.endpoint()), TransportError);
}

TEST(HttpProvider, MalformedBodyIsTransportError) {
  StubServer server([](const httplib::Request&, httplib::Response& res) {
    res.set_content(R"({"choices":[]})", "application/json");
  });
  EXPECT_THROW(http_complete(request(), server.endpoint()), TransportError);
}

TEST(HttpProvider, CredentialComesFromEnvironment) {
  std::string auth;
  StubServer server([&](const httplib::Request& req, httplib::Response& res) {
    auth = req.get_header_value("Authorization");
    res.set_content(kOkBody, "application/json");
  });
  auto endpoint = server.endpoint();
  endpoint.credential_env = "COSTEVAL_TEST_KEY_UNSET_1";
  ::unsetenv("COSTEVAL_TEST_KEY_UNSET_1");
  EXPECT_THROW(http_complete(request(), endpoint), AuthError);
  ::setenv("COSTEVAL_TEST_KEY_UNSET_1", "sk-test", 1);
  EXPECT_NO_THROW(http_complete(request(), endpoint));
  EXPECT_EQ(auth, "Bearer sk-test");
  ::unsetenv("COSTEVAL_TEST_KEY_UNSET_1");
}

TEST(HttpProvider, UnreachableEndpoint) {
  EndpointConfig e;
  e.base_url = "http://127.0.0.1:1";
  e.models = {{"gpt-4-turbo", "x"}};
  e.timeout = std::chrono::milliseconds(1000);
  EXPECT_THROW(http_complete(request(), e), TransportError);
  EXPECT_THROW(http_complete([] { auto r = request(); r.model = "other"; return r; }(), e),
               UnknownModel);
}

TEST(EndpointConfig, JsonNeverCarriesTheSecret) {
  const auto doc = nlohmann::ordered_json::parse(R"({
    "base_url": "http://127.0.0.1:8080",
    "models": {"gpt-4-turbo": "gpt-4-turbo-2024-04-09"},
    "credential_env": "COSTEVAL_API_KEY",
    "retry_budget": 2,
    "backoff_base_ms": 10
  })");
  const auto e = EndpointConfig::from_json(doc);
  EXPECT_EQ(e.retry_budget, 2u);
  EXPECT_EQ(e.backoff_base.count(), 10);
  const std::string dumped = e.to_json().dump();
  EXPECT_NE(dumped.find("COSTEVAL_API_KEY"), std::string::npos);
  EXPECT_EQ(EndpointConfig::from_json(e.to_json()).models, e.models);
  EXPECT_THROW(EndpointConfig::from_json(nlohmann::ordered_json::parse(R"({"models":{}})")),
               SchemaError);
}

TEST(WireFormat, ParsesUsage) {
  const auto r = parse_wire_response(kOkBody);
  EXPECT_EQ(r.usage.input_tokens, 12u);
  EXPECT_THROW(parse_wire_response("not json"), TransportError);
}

}  // namespace
}  // namespace costeval
