#include <gtest/gtest.h>

#include <atomic>
#include <cstdlib>

#include <nlohmann/json.hpp>

#include "local_server.hpp"
#include "statclaim/chat_adapter.hpp"
#include "statclaim/error.hpp"

using namespace statclaim;
using statclaim::testing::LocalServer;

namespace {

ErrorCode code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorCode::InvalidArgument;
}

HttpAdapterConfig config_for(const LocalServer& srv) {
  HttpAdapterConfig c;
  c.base_url = srv.url();
  c.model = "test-model";
  c.timeout_seconds = 5;
  return c;
}

}  // namespace

TEST(Request, PromptIsLastUserMessage) {
  auto r = make_request("decompose", "hello", 0.3);
  EXPECT_EQ(r.purpose, "decompose");
  EXPECT_EQ(r.temperature, 0.3);
  r.messages.insert(r.messages.begin(), {"system", "be brief"});
  EXPECT_EQ(r.prompt(), "hello");
  EXPECT_TRUE(ChatRequest{}.prompt().empty());
}

TEST(FirstTextBlock, ResponseShapes) {
  EXPECT_EQ(first_text_block(R"({"choices":[{"message":{"role":"assistant","content":"A"}}]})"), "A");
  EXPECT_EQ(first_text_block(R"({"choices":[{"text":"B"}]})"), "B");
  EXPECT_EQ(first_text_block(R"({"content":[{"type":"image"},{"type":"text","text":"C"}]})"), "C");
  EXPECT_EQ(first_text_block(R"({"text":"D"})"), "D");
  EXPECT_EQ(code_of([] { first_text_block("not json"); }), ErrorCode::Parse);
  EXPECT_EQ(code_of([] { first_text_block(R"({"choices":[]})"); }), ErrorCode::Parse);
}

TEST(Http, WireContract) {
  LocalServer srv;
  nlohmann::json seen;
  std::string auth;
  srv.server().Post("/v1/chat/completions", [&](const httplib::Request& req, httplib::Response& res) {
    seen = nlohmann::json::parse(req.body);
    auth = req.get_header_value("Authorization");
    res.set_content(R"({"choices":[{"message":{"content":"ok"}}]})", "application/json");
  });
  auto cfg = config_for(srv);
  cfg.auth_token = "s3cret";
  HttpChatAdapter adapter(cfg);
  EXPECT_EQ(adapter.complete(make_request("x", "question")), "ok");
  EXPECT_EQ(seen.at("model"), "test-model");
  EXPECT_EQ(seen.at("temperature"), 0.0);
  EXPECT_EQ(seen.at("messages"), nlohmann::json::parse(R"([{"role":"user","content":"question"}])"));
  EXPECT_FALSE(seen.contains("purpose"));
  EXPECT_EQ(auth, "Bearer s3cret");
}

TEST(Http, NoTokenNoHeader) {
  LocalServer srv;
  bool has_auth = true;
  srv.server().Post("/v1/chat/completions", [&](const httplib::Request& req, httplib::Response& res) {
    has_auth = req.has_header("Authorization");
    res.set_content(R"({"text":"ok"})", "application/json");
  });
  HttpChatAdapter adapter(config_for(srv));
  adapter.complete(make_request("x", "q"));
  EXPECT_FALSE(has_auth);
}

TEST(Http, RetriesTransientFailures) {
  LocalServer srv;
  std::atomic<int> calls{0};
  srv.server().Post("/v1/chat/completions", [&](const httplib::Request&, httplib::Response& res) {
    if (++calls < 3) {
      res.status = 503;
      return;
    }
    res.set_content(R"({"text":"third time"})", "application/json");
  });
  HttpChatAdapter adapter(config_for(srv));
  EXPECT_EQ(adapter.complete(make_request("x", "q")), "third time");
  EXPECT_EQ(calls.load(), 3);
}

TEST(Http, GivesUpAfterRetries) {
  LocalServer srv;
  std::atomic<int> calls{0};
  srv.server().Post("/v1/chat/completions", [&](const httplib::Request&, httplib::Response& res) {
    ++calls;
    res.set_content("garbage", "text/plain");
  });
  auto cfg = config_for(srv);
  cfg.max_retries = 1;
  HttpChatAdapter adapter(cfg);
  EXPECT_EQ(code_of([&] { adapter.complete(make_request("x", "q")); }), ErrorCode::AdapterUnavailable);
  EXPECT_EQ(calls.load(), 2);
}

TEST(Http, ConnectionRefusedIsUnavailable) {
  HttpAdapterConfig cfg;
  cfg.base_url = "http://127.0.0.1:1";
  cfg.timeout_seconds = 2;
  cfg.max_retries = 0;
  HttpChatAdapter adapter(cfg);
  EXPECT_EQ(code_of([&] { adapter.complete(make_request("x", "q")); }), ErrorCode::AdapterUnavailable);
  EXPECT_EQ(code_of([] { HttpChatAdapter{HttpAdapterConfig{}}; }), ErrorCode::InvalidArgument);
}

TEST(Http, ConfigFromEnvironment) {
  ::setenv("STATCLAIM_ADAPTER_URL", "http://example.test:9000", 1);
  ::setenv("STATCLAIM_API_TOKEN", "tok", 1);
  ::setenv("STATCLAIM_MODEL", "m1", 1);
  const auto c = HttpAdapterConfig::from_env();
  EXPECT_EQ(c.base_url, "http://example.test:9000");
  EXPECT_EQ(c.auth_token, "tok");
  EXPECT_EQ(c.model, "m1");
  ::unsetenv("STATCLAIM_ADAPTER_URL");
  ::unsetenv("STATCLAIM_API_TOKEN");
  ::unsetenv("STATCLAIM_MODEL");
  EXPECT_TRUE(HttpAdapterConfig::from_env().base_url.empty());
}

TEST(Caching, MemoizesDeterministicCalls) {
  int calls = 0;
  auto inner = std::make_shared<FunctionAdapter>([&](const ChatRequest& r) {
    ++calls;
    return r.prompt() + std::to_string(calls);
  });
  CachingAdapter cache(inner);
  EXPECT_EQ(cache.complete(make_request("p", "a")), "a1");
  EXPECT_EQ(cache.complete(make_request("p", "a")), "a1");
  EXPECT_EQ(cache.complete(make_request("q", "a")), "a2");  // purpose is part of the key
  EXPECT_EQ(cache.complete(make_request("p", "a", 0.7)), "a3");
  EXPECT_EQ(cache.complete(make_request("p", "a", 0.7)), "a4");
  EXPECT_EQ(cache.hits(), 1u);
  EXPECT_EQ(calls, 4);
}

TEST(Caching, ErrorsAreNotCached) {
  int calls = 0;
  auto inner = std::make_shared<FunctionAdapter>([&](const ChatRequest&) -> std::string {
    if (++calls == 1) throw Error(ErrorCode::AdapterUnavailable, "down");
    return "up";
  });
  CachingAdapter cache(inner);
  EXPECT_THROW(cache.complete(make_request("p", "a")), Error);
  EXPECT_EQ(cache.complete(make_request("p", "a")), "up");
}

TEST(Queue, ReplaysThenRunsDry) {
  QueueAdapter q({"one", "two"});
  EXPECT_EQ(q.complete(make_request("a", "x")), "one");
  EXPECT_EQ(q.complete(make_request("b", "y")), "two");
  EXPECT_EQ(code_of([&] { q.complete(make_request("c", "z")); }), ErrorCode::AdapterUnavailable);
  EXPECT_EQ(q.calls(), 3u);
  EXPECT_EQ(q.requests()[1].purpose, "b");
  EXPECT_EQ(q.requests()[1].prompt(), "y");
}
