#include "irec/explain/render.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <fmt/format.h>

namespace irec::explain {

MissingMetadata::MissingMetadata(ItemId item)
    : DataError(fmt::format("item {} has no title in the catalog", item)), item_(item) {}

namespace {

bool needs_model(Strategy s) {
  return s == Strategy::ModelBased || s == Strategy::Combined;
}

bool needs_history(Strategy s) {
  return s == Strategy::HistoryBased || s == Strategy::Combined;
}

std::string genre_list(const std::vector<std::string>& genres) {
  return genres.empty() ? std::string("(none)") : fmt::format("{}", fmt::join(genres, ", "));
}

ItemMeta meta_of(const data::ItemCatalog& catalog, ItemId id) {
  const data::Item* item = catalog.find(id);
  if (item == nullptr || item->title.empty()) throw MissingMetadata(id);
  return ItemMeta{item->title, item->genres};
}

void append_model_block(std::string& out, const ExplanationJob& job) {
  out += "User types:\n";
  for (const auto& p : job.type_profiles) {
    out += fmt::format("Type {}: {}\n", p.type_index + 1, p.description);
  }
  out += "\nUser weights over the types:";
  for (std::size_t t = 0; t < job.weights.size(); ++t) {
    out += fmt::format(" Type {} = {:.4f}{}", t + 1, job.weights[t],
                       t + 1 < job.weights.size() ? "," : "");
  }
  out += "\n";
}

void append_item_block(std::string& out, const ExplanationJob& job) {
  out += fmt::format("Recommended movie: {}\nGenres: {}\n", job.item_meta.title,
                     genre_list(job.item_meta.genres));
}

void append_scores_block(std::string& out, const ExplanationJob& job) {
  out += "Score given by each user type:";
  for (std::size_t t = 0; t < job.type_scores.size(); ++t) {
    out += fmt::format(" Type {} = {:.2f}{}", t + 1, job.type_scores[t],
                       t + 1 < job.type_scores.size() ? "," : "");
  }
  out += fmt::format("\nFinal predicted score: {:.2f}\n", job.predicted);
}

void append_history_block(std::string& out, const ExplanationJob& job) {
  out += "Movies the user rated highly:\n";
  for (const auto& liked : job.liked_items) {
    out += fmt::format("- {} ({})\n", liked.meta.title, genre_list(liked.meta.genres));
  }
}

}  // namespace

void validate_job(const ExplanationJob& job) {
  if (job.strategy == Strategy::UserTypes) {
    throw InvalidJob("user-type interpretation is not a per-item explanation");
  }
  if (job.item_meta.title.empty()) throw MissingMetadata(job.item);
  if (needs_model(job.strategy)) {
    if (job.type_profiles.empty()) {
      throw MissingProfiles(fmt::format("strategy '{}' needs user-type profiles; run explain-types first",
                                        to_string(job.strategy)));
    }
    const std::size_t r = job.weights.size();
    if (job.type_profiles.size() != r || job.type_scores.size() != r) {
      throw MissingProfiles(fmt::format("expected {} user-type profiles, got {}", r,
                                        job.type_profiles.size()));
    }
    for (std::size_t t = 0; t < r; ++t) {
      if (job.type_profiles[t].type_index != t || job.type_profiles[t].description.empty()) {
        throw MissingProfiles(fmt::format("profile for user type {} is missing or empty", t));
      }
    }
    const double sum = std::accumulate(job.weights.begin(), job.weights.end(), 0.0);
    const bool nonneg =
        std::all_of(job.weights.begin(), job.weights.end(), [](double w) { return w >= 0.0; });
    if (!nonneg || std::abs(sum - 1.0) > 1e-9) {
      throw InvalidJob(fmt::format("user weights must be non-negative and sum to 1 (sum {})", sum));
    }
  }
  if (needs_history(job.strategy)) {
    if (job.liked_items.empty()) {
      throw EmptyHistory(fmt::format("user {} has no movie rated {} or more", job.user,
                                     kLikedRating));
    }
    for (const auto& liked : job.liked_items) {
      if (liked.rating < kLikedRating) {
        throw InvalidJob(fmt::format("liked item '{}' is rated {}", liked.meta.title, liked.rating));
      }
    }
  }
}

PromptPair render_user_types_prompt(const bssmf::FactorModel& model,
                                    const data::ItemCatalog& catalog, std::size_t t) {
  if (t >= model.rank()) {
    throw IndexOutOfRange(fmt::format("user type {} out of range (r = {})", t, model.rank()));
  }
  const auto& ids = model.item_ids();
  std::vector<std::size_t> order(ids.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  const auto& w = model.W();
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const double sa = w(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(t));
    const double sb = w(static_cast<Eigen::Index>(b), static_cast<Eigen::Index>(t));
    if (sa != sb) return sa > sb;
    return ids[a] < ids[b];
  });
  std::string user;
  for (const std::size_t k : order) {
    const ItemMeta meta = meta_of(catalog, ids[k]);
    user += fmt::format("{} | {:.2f} | {}\n", meta.title,
                        w(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(t)),
                        fmt::join(meta.genres, ", "));
  }
  return PromptPair{system_template(Strategy::UserTypes), std::move(user)};
}

PromptPair render_explanation_prompt(const ExplanationJob& job, bool keep_translation) {
  validate_job(job);
  std::string user;
  switch (job.strategy) {
    case Strategy::ModelBased:
      append_model_block(user, job);
      user += "\n";
      append_item_block(user, job);
      append_scores_block(user, job);
      break;
    case Strategy::HistoryBased:
      append_item_block(user, job);
      user += "\n";
      append_history_block(user, job);
      break;
    case Strategy::Combined:
      append_model_block(user, job);
      user += "\n";
      append_item_block(user, job);
      append_scores_block(user, job);
      user += "\n";
      append_history_block(user, job);
      break;
    case Strategy::UserTypes:
      break;
  }
  return PromptPair{system_template(job.strategy, keep_translation), std::move(user)};
}

ExplanationJob make_job(Strategy strategy, UserId user, ItemId item,
                        const bssmf::FactorModel& model,
                        const data::ItemCatalog& catalog,
                        const data::RatingDataset& history,
                        const std::vector<UserTypeProfile>& profiles) {
  ExplanationJob job;
  job.strategy = strategy;
  job.user = user;
  job.item = item;
  job.item_meta = meta_of(catalog, item);

  if (needs_model(strategy)) {
    const auto u = model.user_index(user);
    const auto i = model.item_index(item);
    if (!u) throw IndexOutOfRange(fmt::format("user {} is not in the model", user));
    if (!i) throw IndexOutOfRange(fmt::format("item {} is not in the model", item));
    const std::size_t r = model.rank();
    job.type_profiles = profiles;
    std::sort(job.type_profiles.begin(), job.type_profiles.end(),
              [](const auto& a, const auto& b) { return a.type_index < b.type_index; });
    job.weights.resize(r);
    job.type_scores.resize(r);
    for (std::size_t t = 0; t < r; ++t) {
      job.weights[t] = model.H()(static_cast<Eigen::Index>(t), static_cast<Eigen::Index>(*u));
      job.type_scores[t] = model.W()(static_cast<Eigen::Index>(*i), static_cast<Eigen::Index>(t));
    }
    job.predicted = bssmf::predict(model, *u, *i);
  }

  if (needs_history(strategy)) {
    std::vector<data::Rating> liked;
    for (const auto& rating : history.ratings_of(user)) {
      if (rating.value >= kLikedRating) liked.push_back(rating);
    }
    std::stable_sort(liked.begin(), liked.end(),
                     [](const auto& a, const auto& b) { return a.value > b.value; });
    for (const auto& rating : liked) {
      job.liked_items.push_back(LikedItem{meta_of(catalog, rating.item), rating.value});
    }
  }

  validate_job(job);
  return job;
}

std::string limit_words(std::string_view text, std::size_t max_words) {
  constexpr std::string_view kSpace = " \t\r\n\f\v";
  if (max_words == 0) return {};
  const auto first = text.find_first_not_of(kSpace);
  if (first == std::string_view::npos) return {};
  text.remove_prefix(first);
  text = text.substr(0, text.find_last_not_of(kSpace) + 1);
  std::size_t pos = 0;
  for (std::size_t words = 0; words < max_words; ++words) {
    const auto end = text.find_first_of(kSpace, pos);
    if (end == std::string_view::npos) return std::string(text);
    if (words + 1 == max_words) return std::string(text.substr(0, end));
    pos = text.find_first_not_of(kSpace, end);
  }
  return std::string(text);
}

}  // namespace irec::explain
