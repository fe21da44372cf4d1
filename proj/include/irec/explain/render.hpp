#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "irec/bssmf/factor_model.hpp"
#include "irec/common/error.hpp"
#include "irec/common/ids.hpp"
#include "irec/data/catalog.hpp"
#include "irec/data/ratings.hpp"
#include "irec/explain/templates.hpp"

namespace irec::explain {

class MissingMetadata : public DataError {
 public:
  explicit MissingMetadata(ItemId item);
  ItemId item() const { return item_; }

 private:
  ItemId item_;
};

class MissingProfiles : public ConfigError {
 public:
  using ConfigError::ConfigError;
};

class EmptyHistory : public ConfigError {
 public:
  using ConfigError::ConfigError;
};

class InvalidJob : public ConfigError {
 public:
  using ConfigError::ConfigError;
};

inline constexpr int kLikedRating = 4;
inline constexpr std::size_t kMaxProfileWords = 100;

struct PromptPair {
  std::string system;
  std::string user;
};

struct UserTypeProfile {
  std::size_t type_index = 0;
  std::string description;
};

struct ItemMeta {
  std::string title;
  std::vector<std::string> genres;
};

struct LikedItem {
  ItemMeta meta;
  int rating = kLikedRating;
};

struct ExplanationJob {
  Strategy strategy = Strategy::HistoryBased;
  UserId user = 0;
  ItemId item = 0;
  ItemMeta item_meta;
  // Model-based and combined only.
  std::vector<UserTypeProfile> type_profiles;  // one per type, by index
  std::vector<double> weights;                 // the user's mixture weights
  std::vector<double> type_scores;             // the item's score under each type
  double predicted = 0.0;
  // History-based and combined only.
  std::vector<LikedItem> liked_items;
};

// Throws MissingProfiles, EmptyHistory or InvalidJob when the job does not
// carry what its strategy needs.
void validate_job(const ExplanationJob& job);

// Every item of latent type t, best score first (ties: lower id), one line
// each as `title | 4.12 | Drama, Comedy`.
PromptPair render_user_types_prompt(const bssmf::FactorModel& model,
                                    const data::ItemCatalog& catalog, std::size_t t);

PromptPair render_explanation_prompt(const ExplanationJob& job,
                                     bool keep_translation = true);

// Assembles the job for (user, item) from the model, catalog and the user's
// rating history, then validates it. Liked items are those rated at least
// kLikedRating, highest rating first.
ExplanationJob make_job(Strategy strategy, UserId user, ItemId item,
                        const bssmf::FactorModel& model,
                        const data::ItemCatalog& catalog,
                        const data::RatingDataset& history,
                        const std::vector<UserTypeProfile>& profiles);

// Trims surrounding whitespace and keeps at most max_words words; text within
// the limit is otherwise unchanged.
std::string limit_words(std::string_view text, std::size_t max_words = kMaxProfileWords);

}  // namespace irec::explain
