#pragma once

#include <atomic>
#include <condition_variable>
#include <filesystem>
#include <memory>
#include <mutex>
#include <shared_mutex>
#include <string>
#include <unordered_map>

#include "astres/prompt/prompt.hpp"
#include "astres/util/http.hpp"

namespace astres::prompt {

class LlmClient {
public:
  virtual ~LlmClient() = default;
  virtual std::string id() const = 0;
  virtual std::string generate(const std::string &prompt) const = 0;
  /// Requests that left the process.
  virtual std::size_t network_calls() const { return 0; }
};

struct ChatOptions {
  std::string model;
  std::size_t max_tokens = 256;
  double temperature = 0.0;
  std::size_t max_in_flight = 4;
  util::HttpOptions http;
};

/// OpenAI-style chat completion endpoint with a single user message.
class RemoteChatClient : public LlmClient {
public:
  RemoteChatClient(std::string url, ChatOptions opts);
  std::string id() const override { return "remote-chat:" + opts_.model; }
  std::string generate(const std::string &prompt) const override;
  std::size_t network_calls() const override { return calls_; }

private:
  std::string url_;
  ChatOptions opts_;
  mutable std::mutex mu_;
  mutable std::condition_variable cv_;
  mutable std::size_t in_flight_ = 0;
  mutable std::atomic<std::size_t> calls_{0};
};

/// Content-addressed cache of completions in JSON-lines
/// {"key": sha256(prompt), "response": ...}. Misses go to `fallback` and
/// are appended to the file; without a fallback a miss throws LookupMiss.
class ReplayClient : public LlmClient {
public:
  explicit ReplayClient(std::filesystem::path cache, std::shared_ptr<const LlmClient> fallback = nullptr);
  std::string id() const override { return "replay"; }
  std::string generate(const std::string &prompt) const override;
  std::size_t network_calls() const override { return fallback_ ? fallback_->network_calls() : 0; }

  static std::string key(const std::string &prompt);
  /// Appends one entry; used to seed caches.
  void put(const std::string &prompt, const std::string &response) const;
  std::size_t size() const;

private:
  std::filesystem::path path_;
  std::shared_ptr<const LlmClient> fallback_;
  mutable std::shared_mutex mu_;
  mutable std::unordered_map<std::string, std::string> entries_;
};

struct Completion {
  std::string raw;
  std::string sql;
};

/// Longest parseable SQL statement in a model response: code fences are
/// stripped, text stops at the first ';' outside quotes and trailing prose
/// is trimmed word by word. Whitespace outside literals is collapsed.
/// Throws ExtractionError carrying the raw text.
std::string extract_sql(const std::string &raw);

Completion complete(const LlmClient &client, const PromptBundle &bundle);

} // namespace astres::prompt
