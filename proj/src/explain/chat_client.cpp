#include "irec/explain/chat_client.hpp"

#include <cstdlib>
#include <thread>

#include <fmt/format.h>
#include <httplib.h>
#include <nlohmann/json.hpp>

#include "irec/common/files.hpp"
#include "irec/common/url.hpp"
#include "irec/explain/boxed.hpp"

namespace irec::explain {

HttpError::HttpError(int status, const std::string& what)
    : TransportError(what), status_(status) {}

void LlmConfig::validate() const {
  if (!(temperature >= 0.0)) throw ConfigError("llm temperature must be >= 0");
  if (timeout.count() <= 0) throw ConfigError("llm timeout must be > 0");
  if (max_tokens == 0) throw ConfigError("llm max_tokens must be > 0");
  if (max_inflight == 0) throw ConfigError("llm max_inflight must be > 0");
  if (model.empty()) throw ConfigError("llm model identifier is empty");
  split_url(endpoint);
}

std::string chat_request_json(const LlmConfig& config, std::string_view system,
                              std::string_view user) {
  nlohmann::json body = {
      {"model", config.model},
      {"messages",
       nlohmann::json::array({{{"role", "system"}, {"content", std::string(system)}},
                              {{"role", "user"}, {"content", std::string(user)}}})},
      {"temperature", config.temperature},
      {"max_tokens", config.max_tokens},
  };
  return body.dump();
}

std::string parse_chat_response(std::string_view body) {
  try {
    const auto doc = nlohmann::json::parse(body);
    const auto& message = doc.at("choices").at(0).at("message");
    std::string text;
    if (message.contains("reasoning_content") && message["reasoning_content"].is_string()) {
      text = "<think>" + message["reasoning_content"].get<std::string>() + "</think>\n";
    }
    if (message.at("content").is_string()) text += message["content"].get<std::string>();
    return text;
  } catch (const nlohmann::json::exception& e) {
    throw HttpError(200, fmt::format("malformed chat-completion response: {}", e.what()));
  }
}

namespace {

LlmReply wrap(std::string raw, std::size_t attempts) {
  auto boxed = extract_boxed(raw);
  return LlmReply{std::move(raw), std::move(boxed.reasoning), std::move(boxed.final), attempts};
}

}  // namespace

HttpChatClient::HttpChatClient(LlmConfig config) : config_(std::move(config)) {
  config_.validate();
  if (const char* key = std::getenv(config_.api_key_env.c_str())) api_key_ = key;
}

LlmReply HttpChatClient::complete(std::string_view system, std::string_view user) {
  const UrlParts url = split_url(config_.endpoint);
  httplib::Client client(url.origin);
  const auto secs = std::chrono::duration_cast<std::chrono::seconds>(config_.timeout);
  const auto usecs =
      std::chrono::duration_cast<std::chrono::microseconds>(config_.timeout - secs);
  client.set_connection_timeout(secs.count(), usecs.count());
  client.set_read_timeout(secs.count(), usecs.count());
  client.set_write_timeout(secs.count(), usecs.count());

  httplib::Headers headers{{"Accept", "application/json"}};
  if (!api_key_.empty()) headers.emplace("Authorization", "Bearer " + api_key_);
  const std::string path = url.base_path + "/chat/completions";
  const std::string body = chat_request_json(config_, system, user);

  auto delay = config_.backoff;
  for (std::size_t attempt = 1;; ++attempt) {
    auto res = client.Post(path, headers, body, "application/json");
    if (!res) {
      const auto err = res.error();
      if (err == httplib::Error::Read || err == httplib::Error::Write ||
          err == httplib::Error::ConnectionTimeout) {
        throw Timeout(fmt::format("POST {}{}: {}", url.origin, path, httplib::to_string(err)));
      }
      throw HttpError(0, fmt::format("POST {}{}: {}", url.origin, path, httplib::to_string(err)));
    }
    const int status = res->status;
    if ((status == 429 || status >= 500) && attempt <= config_.max_retries) {
      std::this_thread::sleep_for(delay);
      delay *= 2;
      continue;
    }
    if (status != 200) {
      throw HttpError(status, fmt::format("POST {}{} returned {} after {} attempt(s)",
                                          url.origin, path, status, attempt));
    }
    return wrap(parse_chat_response(res->body), attempt);
  }
}

StubChatClient::StubChatClient(std::filesystem::path fixture_dir, std::string model_id)
    : dir_(std::move(fixture_dir)), model_id_(std::move(model_id)) {
  if (!std::filesystem::is_directory(dir_)) {
    throw ConfigError("stub LLM directory not found: " + dir_.string());
  }
}

std::string StubChatClient::request_key(std::string_view system, std::string_view user) {
  std::string joined;
  joined.reserve(system.size() + user.size() + 1);
  joined.append(system).push_back('\0');
  joined.append(user);
  return sha256_hex(joined).substr(0, 16);
}

LlmReply StubChatClient::complete(std::string_view system, std::string_view user) {
  const auto keyed = dir_ / (request_key(system, user) + ".txt");
  const auto fallback = dir_ / "default.txt";
  std::filesystem::path chosen;
  if (std::filesystem::exists(keyed)) {
    chosen = keyed;
  } else if (std::filesystem::exists(fallback)) {
    chosen = fallback;
  } else {
    throw HttpError(404, "stub LLM has no reply for key " + request_key(system, user));
  }
  return wrap(read_file(chosen), 1);
}

LlmReply chat_completion(const LlmConfig& config, std::string_view system,
                         std::string_view user) {
  HttpChatClient client(config);
  return client.complete(system, user);
}

}  // namespace irec::explain
