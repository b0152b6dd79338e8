#pragma once

#include <cstddef>
#include <deque>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

namespace statclaim {

struct ChatMessage {
  std::string role;
  std::string content;
};

struct ChatRequest {
  std::vector<ChatMessage> messages;
  double temperature = 0.0;
  /// Prompt name ("decompose", "generate_sql", ...). Not sent on the wire;
  /// scripted adapters dispatch on it.
  std::string purpose;

  /// Content of the last user message.
  const std::string& prompt() const;
};

ChatRequest make_request(std::string purpose, std::string prompt, double temperature = 0.0);

/// A chat-completion backend. Implementations throw Error(AdapterUnavailable)
/// when the backend cannot answer.
class ChatAdapter {
 public:
  virtual ~ChatAdapter() = default;
  virtual std::string complete(const ChatRequest& request) = 0;
};

struct HttpAdapterConfig {
  std::string base_url;  // e.g. http://127.0.0.1:8080
  std::string path = "/v1/chat/completions";
  std::string model;
  std::string auth_token;
  double timeout_seconds = 60.0;
  int max_retries = 2;
  /// Process-wide cap on concurrent requests across all HTTP adapters.
  int max_in_flight = 8;

  /// base_url from STATCLAIM_ADAPTER_URL, auth_token from STATCLAIM_API_TOKEN,
  /// model from STATCLAIM_MODEL.
  static HttpAdapterConfig from_env();
};

/// JSON-over-HTTP: POST {model, messages, temperature}; the reply is the
/// first text block of an OpenAI-style (choices[0].message.content),
/// content-block style (content[0].text) or plain {"text": ...} body.
class HttpChatAdapter : public ChatAdapter {
 public:
  explicit HttpChatAdapter(HttpAdapterConfig config);
  std::string complete(const ChatRequest& request) override;
  const HttpAdapterConfig& config() const { return config_; }

 private:
  HttpAdapterConfig config_;
};

/// Extracts the first text block from a response body; throws Parse.
std::string first_text_block(const std::string& body);

/// Memoizes temperature-0 calls by request content.
class CachingAdapter : public ChatAdapter {
 public:
  explicit CachingAdapter(std::shared_ptr<ChatAdapter> inner);
  std::string complete(const ChatRequest& request) override;
  std::size_t hits() const;

 private:
  std::shared_ptr<ChatAdapter> inner_;
  mutable std::mutex mu_;
  std::map<std::string, std::string> cache_;
  std::size_t hits_ = 0;
};

/// Answers with a callback; for tests and offline runs.
class FunctionAdapter : public ChatAdapter {
 public:
  using Fn = std::function<std::string(const ChatRequest&)>;
  explicit FunctionAdapter(Fn fn);
  std::string complete(const ChatRequest& request) override;

 private:
  Fn fn_;
};

/// Replays canned responses in order; an exhausted queue is unavailable.
class QueueAdapter : public ChatAdapter {
 public:
  explicit QueueAdapter(std::vector<std::string> responses);
  std::string complete(const ChatRequest& request) override;
  std::size_t calls() const;
  const std::vector<ChatRequest>& requests() const { return requests_; }

 private:
  mutable std::mutex mu_;
  std::deque<std::string> responses_;
  std::vector<ChatRequest> requests_;
};

}  // namespace statclaim
