#pragma once

#include <chrono>
#include <cstddef>
#include <filesystem>
#include <string>
#include <string_view>

#include "irec/common/error.hpp"

namespace irec::explain {

class Timeout : public TransportError {
 public:
  using TransportError::TransportError;
};

class HttpError : public TransportError {
 public:
  HttpError(int status, const std::string& what);
  int status() const { return status_; }

 private:
  int status_;
};

struct LlmConfig {
  std::string endpoint = "http://localhost:8000/v1";
  std::string model = "deepseek-ai/DeepSeek-R1-Distill-Llama-70B";
  double temperature = 0.6;
  std::size_t max_tokens = 2048;
  std::chrono::milliseconds timeout{300000};
  std::size_t max_retries = 3;
  std::chrono::milliseconds backoff{1000};
  std::string api_key_env = "LLM_API_KEY";
  std::size_t max_inflight = 2;
  bool keep_translation = true;

  // Throws ConfigError on a negative temperature or non-positive timeout.
  void validate() const;
};

struct LlmReply {
  std::string raw;
  std::string reasoning;
  std::string final;
  std::size_t attempts = 1;
};

// Something that answers a (system, user) prompt pair. Implementations must be
// safe to call from several threads at once.
class ChatClient {
 public:
  virtual ~ChatClient() = default;
  virtual LlmReply complete(std::string_view system, std::string_view user) = 0;
  virtual std::string model_id() const = 0;
};

// OpenAI-compatible POST {endpoint}/chat/completions. Retries 429 and 5xx
// with exponential backoff, up to max_retries extra attempts. The bearer token
// comes from the environment variable named by api_key_env, if set.
class HttpChatClient final : public ChatClient {
 public:
  explicit HttpChatClient(LlmConfig config);
  LlmReply complete(std::string_view system, std::string_view user) override;
  std::string model_id() const override { return config_.model; }

 private:
  LlmConfig config_;
  std::string api_key_;
};

// Offline stand-in. Replies with <dir>/<key>.txt, where key is the first 16
// hex digits of request_key(system, user), falling back to <dir>/default.txt;
// answers 404 when neither exists.
class StubChatClient final : public ChatClient {
 public:
  explicit StubChatClient(std::filesystem::path fixture_dir,
                          std::string model_id = "stub");
  LlmReply complete(std::string_view system, std::string_view user) override;
  std::string model_id() const override { return model_id_; }

  static std::string request_key(std::string_view system, std::string_view user);

 private:
  std::filesystem::path dir_;
  std::string model_id_;
};

std::string chat_request_json(const LlmConfig& config, std::string_view system,
                              std::string_view user);

// Assistant text of a chat-completion response. A separate reasoning_content
// field, when present, is folded in as a leading <think>...</think> block.
std::string parse_chat_response(std::string_view body);

// One-shot request through a fresh HttpChatClient.
LlmReply chat_completion(const LlmConfig& config, std::string_view system,
                         std::string_view user);

}  // namespace irec::explain
