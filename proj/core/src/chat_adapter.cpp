#include "statclaim/chat_adapter.hpp"

#include <condition_variable>
#include <cstdlib>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "statclaim/error.hpp"
#include "statclaim/hashing.hpp"

namespace statclaim {

using nlohmann::json;

namespace {

class InFlightLimiter {
 public:
  void acquire(int cap) {
    std::unique_lock lock(mu_);
    cv_.wait(lock, [&] { return active_ < cap; });
    ++active_;
  }
  void release() {
    {
      std::lock_guard lock(mu_);
      --active_;
    }
    cv_.notify_one();
  }

 private:
  std::mutex mu_;
  std::condition_variable cv_;
  int active_ = 0;
};

InFlightLimiter& limiter() {
  static InFlightLimiter l;
  return l;
}

std::string env_or(const char* name, std::string fallback) {
  const char* v = std::getenv(name);
  return v && *v ? std::string(v) : fallback;
}

}  // namespace

const std::string& ChatRequest::prompt() const {
  static const std::string empty;
  for (auto it = messages.rbegin(); it != messages.rend(); ++it) {
    if (it->role == "user") return it->content;
  }
  return empty;
}

ChatRequest make_request(std::string purpose, std::string prompt, double temperature) {
  ChatRequest r;
  r.purpose = std::move(purpose);
  r.temperature = temperature;
  r.messages.push_back({"user", std::move(prompt)});
  return r;
}

HttpAdapterConfig HttpAdapterConfig::from_env() {
  HttpAdapterConfig c;
  c.base_url = env_or("STATCLAIM_ADAPTER_URL", "");
  c.auth_token = env_or("STATCLAIM_API_TOKEN", "");
  c.model = env_or("STATCLAIM_MODEL", "");
  return c;
}

HttpChatAdapter::HttpChatAdapter(HttpAdapterConfig config) : config_(std::move(config)) {
  if (config_.base_url.empty()) throw Error(ErrorCode::InvalidArgument, "adapter base URL is empty");
}

std::string first_text_block(const std::string& body) {
  json j;
  try {
    j = json::parse(body);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::Parse, std::string("adapter response is not JSON: ") + e.what());
  }
  if (j.contains("choices") && !j["choices"].empty()) {
    const auto& c = j["choices"][0];
    if (c.contains("message") && c["message"].contains("content") && c["message"]["content"].is_string()) {
      return c["message"]["content"].get<std::string>();
    }
    if (c.contains("text") && c["text"].is_string()) return c["text"].get<std::string>();
  }
  if (j.contains("content") && j["content"].is_array()) {
    for (const auto& block : j["content"]) {
      if (block.contains("text") && block["text"].is_string()) return block["text"].get<std::string>();
    }
  }
  if (j.contains("text") && j["text"].is_string()) return j["text"].get<std::string>();
  throw Error(ErrorCode::Parse, "adapter response has no text block");
}

std::string HttpChatAdapter::complete(const ChatRequest& request) {
  json messages = json::array();
  for (const auto& m : request.messages) messages.push_back({{"role", m.role}, {"content", m.content}});
  const json payload{{"model", config_.model}, {"messages", messages}, {"temperature", request.temperature}};
  const std::string body = payload.dump();

  httplib::Client client(config_.base_url);
  const auto secs = static_cast<time_t>(config_.timeout_seconds);
  const auto usecs = static_cast<time_t>((config_.timeout_seconds - static_cast<double>(secs)) * 1e6);
  client.set_connection_timeout(secs, usecs);
  client.set_read_timeout(secs, usecs);
  client.set_write_timeout(secs, usecs);
  httplib::Headers headers;
  if (!config_.auth_token.empty()) headers.emplace("Authorization", "Bearer " + config_.auth_token);

  std::string last_error = "no attempt";
  for (int attempt = 0; attempt <= config_.max_retries; ++attempt) {
    limiter().acquire(config_.max_in_flight);
    auto res = client.Post(config_.path, headers, body, "application/json");
    limiter().release();
    if (!res) {
      last_error = httplib::to_string(res.error());
      continue;
    }
    if (res->status != 200) {
      last_error = "HTTP " + std::to_string(res->status);
      continue;
    }
    try {
      return first_text_block(res->body);
    } catch (const Error& e) {
      last_error = e.what();
    }
  }
  throw Error(ErrorCode::AdapterUnavailable, config_.base_url + ": " + last_error);
}

CachingAdapter::CachingAdapter(std::shared_ptr<ChatAdapter> inner) : inner_(std::move(inner)) {}

std::string CachingAdapter::complete(const ChatRequest& request) {
  if (request.temperature != 0.0) return inner_->complete(request);
  std::string key = request.purpose;
  for (const auto& m : request.messages) key += "\x1f" + m.role + "\x1e" + m.content;
  key = sha256_hex(key);
  {
    std::lock_guard lock(mu_);
    if (auto it = cache_.find(key); it != cache_.end()) {
      ++hits_;
      return it->second;
    }
  }
  std::string out = inner_->complete(request);
  std::lock_guard lock(mu_);
  cache_.emplace(key, out);
  return out;
}

std::size_t CachingAdapter::hits() const {
  std::lock_guard lock(mu_);
  return hits_;
}

FunctionAdapter::FunctionAdapter(Fn fn) : fn_(std::move(fn)) {}

std::string FunctionAdapter::complete(const ChatRequest& request) { return fn_(request); }

QueueAdapter::QueueAdapter(std::vector<std::string> responses)
    : responses_(responses.begin(), responses.end()) {}

std::string QueueAdapter::complete(const ChatRequest& request) {
  std::lock_guard lock(mu_);
  requests_.push_back(request);
  if (responses_.empty()) throw Error(ErrorCode::AdapterUnavailable, "queue adapter exhausted");
  std::string out = std::move(responses_.front());
  responses_.pop_front();
  return out;
}

std::size_t QueueAdapter::calls() const {
  std::lock_guard lock(mu_);
  return requests_.size();
}

}  // namespace statclaim
