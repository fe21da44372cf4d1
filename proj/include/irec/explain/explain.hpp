#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <shared_mutex>
#include <string>
#include <utility>
#include <vector>

#include "irec/bssmf/factor_model.hpp"
#include "irec/common/error.hpp"
#include "irec/data/catalog.hpp"
#include "irec/data/ratings.hpp"
#include "irec/explain/chat_client.hpp"
#include "irec/explain/render.hpp"
#include "irec/recommend/recommend.hpp"

namespace irec::explain {

// Type descriptions keyed by (model hash, type index). Backed by a JSON file
// when a path is given; many readers, one writer.
class ProfileCache {
 public:
  ProfileCache() = default;
  explicit ProfileCache(std::filesystem::path file);

  std::optional<std::string> get(const std::string& model_hash, std::size_t t) const;
  void put(const std::string& model_hash, std::size_t t, std::string description);
  std::size_t size() const;
  // No-op without a backing file.
  void save() const;

 private:
  std::filesystem::path file_;
  mutable std::shared_mutex mutex_;
  std::map<std::pair<std::string, std::size_t>, std::string> entries_;
};

// SHA-256 of the serialized model.
std::string model_hash(const bssmf::FactorModel& model);

class PartialResult : public TransportError {
 public:
  PartialResult(std::vector<UserTypeProfile> completed, std::size_t failed_type,
                const std::string& cause);
  const std::vector<UserTypeProfile>& completed() const { return completed_; }
  std::size_t failed_type() const { return failed_type_; }

 private:
  std::vector<UserTypeProfile> completed_;
  std::size_t failed_type_;
};

// One description per latent type, in type order. Types are asked one at a
// time; the first failure stops the run with PartialResult listing the types
// done so far (those are already in the cache).
std::vector<UserTypeProfile> interpret_user_types(const bssmf::FactorModel& model,
                                                  const data::ItemCatalog& catalog,
                                                  ChatClient& client, ProfileCache& cache);

struct ExplanationContext {
  const bssmf::FactorModel& model;
  const data::ItemCatalog& catalog;
  const data::RatingDataset& history;
  const std::vector<UserTypeProfile>& profiles;
};

struct ExplanationOutcome {
  ItemId item = 0;
  std::optional<LlmReply> reply;
  std::string error;  // set when reply is empty

  bool ok() const { return reply.has_value(); }
};

// One outcome per slate item, in slate order, with at most max_inflight
// requests in flight. Every job is built and validated before any request is
// sent, so precondition errors throw; transport and extraction failures are
// recorded per item.
std::vector<ExplanationOutcome> explain_slate(const recommend::Slate& slate,
                                              Strategy strategy,
                                              const ExplanationContext& context,
                                              ChatClient& client,
                                              std::size_t max_inflight = 2,
                                              bool keep_translation = true);

// {user_id, item_id, strategy, explanation, reasoning_len, model_id}, plus
// "error" in place of the text for failed items.
std::string explanation_record_json(UserId user, const ExplanationOutcome& outcome,
                                    Strategy strategy, const std::string& model_id);
// {type_index, description, model_hash}
std::string profile_record_json(const UserTypeProfile& profile, const std::string& model_hash);
std::vector<UserTypeProfile> profiles_from_jsonl(std::string_view text);

}  // namespace irec::explain
