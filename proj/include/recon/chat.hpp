#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

namespace recon {

struct ChatMessage {
  std::string role;  // system | user | assistant
  std::string content;
};

struct ChatRequest {
  std::string model;
  std::vector<ChatMessage> messages;
  double temperature = 0.0;
  std::optional<std::int64_t> seed = 0;

  nlohmann::json to_json() const;
};

struct ChatResponse {
  std::string text;
  std::string finish_reason;
};

class ChatClient {
 public:
  virtual ~ChatClient() = default;
  /// Throws BackendError.
  virtual ChatResponse complete(const ChatRequest& request) = 0;
};

/// OpenAI-compatible chat-completion endpoint configuration.
struct LlmSettings {
  std::string endpoint;  // http://host:port[/prefix]
  std::string api_key;
  std::string model = "mistral-small-3.2-24b-instruct-2506";
  double timeout_seconds = 60.0;
  int retries = 2;

  /// RECON_LLM_ENDPOINT, RECON_LLM_API_KEY, RECON_LLM_MODEL, RECON_LLM_TIMEOUT, RECON_LLM_RETRIES.
  static LlmSettings from_env();
  bool configured() const { return !endpoint.empty(); }
};

class HttpChatClient final : public ChatClient {
 public:
  explicit HttpChatClient(LlmSettings settings);
  ChatResponse complete(const ChatRequest& request) override;

  const LlmSettings& settings() const { return settings_; }

 private:
  LlmSettings settings_;
  std::string base_;  // scheme://host:port
  std::string path_;  // .../chat/completions
};

/// Stable content hash of a request (FNV-1a over its canonical JSON), hex encoded.
std::string request_key(const ChatRequest& request);

/// Replays responses stored under `directory/<request_key>.json`; misses go to `inner`
/// (or fail with BackendErrc::not_configured when there is none) and are stored atomically.
class CachingChatClient final : public ChatClient {
 public:
  CachingChatClient(std::shared_ptr<ChatClient> inner, std::filesystem::path directory);
  ChatResponse complete(const ChatRequest& request) override;

 private:
  std::shared_ptr<ChatClient> inner_;
  std::filesystem::path directory_;
  std::mutex mutex_;
};

struct ChatExchange {
  ChatRequest request;
  std::optional<ChatResponse> response;
  std::string error;
};

/// Keeps every exchange so transcripts can carry the raw backend traffic.
class RecordingChatClient final : public ChatClient {
 public:
  explicit RecordingChatClient(std::shared_ptr<ChatClient> inner) : inner_(std::move(inner)) {}
  ChatResponse complete(const ChatRequest& request) override;

  std::vector<ChatExchange> take();

 private:
  std::shared_ptr<ChatClient> inner_;
  std::mutex mutex_;
  std::vector<ChatExchange> log_;
};

struct FinalAnswer {
  nlohmann::json value;
  std::string text;  // the model reply the value was extracted from
};

/// Sends `request`; if the reply has no parsable Final answer, re-prompts once, then throws
/// BackendError(extraction).
FinalAnswer complete_with_final_answer(ChatClient& client, ChatRequest request);

}  // namespace recon
