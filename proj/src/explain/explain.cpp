#include "irec/explain/explain.hpp"

#include <algorithm>
#include <atomic>
#include <mutex>
#include <sstream>
#include <thread>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "irec/common/files.hpp"

namespace irec::explain {

ProfileCache::ProfileCache(std::filesystem::path file) : file_(std::move(file)) {
  if (file_.empty() || !std::filesystem::exists(file_)) return;
  try {
    const auto doc = nlohmann::json::parse(read_file(file_));
    for (const auto& entry : doc.at("profiles")) {
      entries_[{entry.at("model_hash").get<std::string>(),
                entry.at("type_index").get<std::size_t>()}] =
          entry.at("description").get<std::string>();
    }
  } catch (const nlohmann::json::exception& e) {
    throw DataError(fmt::format("profile cache {} is malformed: {}", file_.string(), e.what()));
  }
}

std::optional<std::string> ProfileCache::get(const std::string& model_hash,
                                             std::size_t t) const {
  std::shared_lock lock(mutex_);
  const auto it = entries_.find({model_hash, t});
  if (it == entries_.end()) return std::nullopt;
  return it->second;
}

void ProfileCache::put(const std::string& model_hash, std::size_t t, std::string description) {
  std::unique_lock lock(mutex_);
  entries_[{model_hash, t}] = std::move(description);
}

std::size_t ProfileCache::size() const {
  std::shared_lock lock(mutex_);
  return entries_.size();
}

void ProfileCache::save() const {
  if (file_.empty()) return;
  nlohmann::json list = nlohmann::json::array();
  {
    std::shared_lock lock(mutex_);
    for (const auto& [key, description] : entries_) {
      list.push_back({{"model_hash", key.first},
                      {"type_index", key.second},
                      {"description", description}});
    }
  }
  write_file_atomic(file_, nlohmann::json{{"profiles", list}}.dump(2) + "\n");
}

std::string model_hash(const bssmf::FactorModel& model) {
  return sha256_hex(bssmf::model_to_json(model));
}

PartialResult::PartialResult(std::vector<UserTypeProfile> completed, std::size_t failed_type,
                             const std::string& cause)
    : TransportError(fmt::format("user type {} failed after {} completed: {}", failed_type,
                                 completed.size(), cause)),
      completed_(std::move(completed)),
      failed_type_(failed_type) {}

std::vector<UserTypeProfile> interpret_user_types(const bssmf::FactorModel& model,
                                                  const data::ItemCatalog& catalog,
                                                  ChatClient& client, ProfileCache& cache) {
  const std::string hash = model_hash(model);
  std::vector<PromptPair> prompts;
  for (std::size_t t = 0; t < model.rank(); ++t) {
    prompts.push_back(render_user_types_prompt(model, catalog, t));
  }
  std::vector<UserTypeProfile> profiles;
  for (std::size_t t = 0; t < model.rank(); ++t) {
    if (auto cached = cache.get(hash, t)) {
      profiles.push_back({t, std::move(*cached)});
      continue;
    }
    try {
      const LlmReply reply = client.complete(prompts[t].system, prompts[t].user);
      std::string description = limit_words(reply.final);
      if (description.empty()) throw DataError("empty user-type description");
      cache.put(hash, t, description);
      profiles.push_back({t, std::move(description)});
    } catch (const Error& e) {
      throw PartialResult(std::move(profiles), t, e.what());
    }
  }
  return profiles;
}

std::vector<ExplanationOutcome> explain_slate(const recommend::Slate& slate,
                                              Strategy strategy,
                                              const ExplanationContext& context,
                                              ChatClient& client, std::size_t max_inflight,
                                              bool keep_translation) {
  std::vector<PromptPair> prompts;
  prompts.reserve(slate.items.size());
  for (const auto& entry : slate.items) {
    const auto job = make_job(strategy, slate.user, entry.item, context.model, context.catalog,
                              context.history, context.profiles);
    prompts.push_back(render_explanation_prompt(job, keep_translation));
  }

  std::vector<ExplanationOutcome> outcomes(slate.items.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t k = next++; k < outcomes.size(); k = next++) {
      auto& out = outcomes[k];
      out.item = slate.items[k].item;
      try {
        out.reply = client.complete(prompts[k].system, prompts[k].user);
      } catch (const Error& e) {
        out.error = e.what();
      }
    }
  };
  const std::size_t n_workers =
      std::clamp<std::size_t>(max_inflight, 1, std::max<std::size_t>(outcomes.size(), 1));
  {
    std::vector<std::jthread> workers;
    for (std::size_t w = 0; w < n_workers; ++w) workers.emplace_back(worker);
  }
  return outcomes;
}

std::string explanation_record_json(UserId user, const ExplanationOutcome& outcome,
                                    Strategy strategy, const std::string& model_id) {
  nlohmann::ordered_json doc{{"user_id", user},
                             {"item_id", outcome.item},
                             {"strategy", std::string(to_string(strategy))}};
  if (outcome.ok()) {
    doc["explanation"] = outcome.reply->final;
    doc["reasoning_len"] = outcome.reply->reasoning.size();
  } else {
    doc["explanation"] = nullptr;
    doc["reasoning_len"] = 0;
    doc["error"] = outcome.error;
  }
  doc["model_id"] = model_id;
  return doc.dump();
}

std::string profile_record_json(const UserTypeProfile& profile, const std::string& model_hash) {
  return nlohmann::ordered_json{{"type_index", profile.type_index},
                                {"description", profile.description},
                                {"model_hash", model_hash}}
      .dump();
}

std::vector<UserTypeProfile> profiles_from_jsonl(std::string_view text) {
  std::vector<UserTypeProfile> profiles;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      const auto doc = nlohmann::json::parse(line);
      profiles.push_back({doc.at("type_index").get<std::size_t>(),
                          doc.at("description").get<std::string>()});
    } catch (const nlohmann::json::exception& e) {
      throw DataError(fmt::format("profiles line {}: {}", line_no, e.what()));
    }
  }
  std::sort(profiles.begin(), profiles.end(),
            [](const auto& a, const auto& b) { return a.type_index < b.type_index; });
  return profiles;
}

}  // namespace irec::explain
