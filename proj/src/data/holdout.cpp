#include "irec/data/holdout.hpp"

#include <algorithm>
#include <numeric>
#include <set>
#include <stdexcept>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "irec/common/rng.hpp"

namespace irec::data {

HoldoutSplit split_holdout(const RatingDataset& dataset,
                           const HoldoutOptions& options) {
  if (options.per_user < 1 || options.per_user > options.min_ratings) {
    throw std::invalid_argument(
        fmt::format("per_user must lie in [1, min_ratings={}], got {}",
                    options.min_ratings, options.per_user));
  }
  Rng rng(options.seed);
  std::vector<Rating> train;
  std::vector<Rating> test;
  train.reserve(dataset.size());
  std::vector<std::size_t> order;
  for (const UserId user : dataset.user_ids()) {
    const auto rows = dataset.ratings_of(user);
    if (rows.size() <= options.min_ratings) {
      train.insert(train.end(), rows.begin(), rows.end());
      continue;
    }
    // Partial Fisher-Yates: the first per_user slots become the test draw.
    order.resize(rows.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    for (std::size_t k = 0; k < options.per_user; ++k) {
      const std::size_t pick = k + rng.index(rows.size() - k);
      std::swap(order[k], order[pick]);
    }
    std::vector<bool> held(rows.size(), false);
    for (std::size_t k = 0; k < options.per_user; ++k) held[order[k]] = true;
    for (std::size_t k = 0; k < rows.size(); ++k) {
      (held[k] ? test : train).push_back(rows[k]);
    }
  }
  return {RatingDataset(std::move(train)), std::move(test)};
}

std::string split_manifest_json(const HoldoutSplit& split,
                                const HoldoutOptions& options) {
  nlohmann::json doc;
  doc["seed"] = options.seed;
  doc["per_user"] = options.per_user;
  doc["min_ratings"] = options.min_ratings;
  auto& test = doc["test"] = nlohmann::json::array();
  for (const Rating& r : split.test) {
    test.push_back({r.user, r.item, r.value});
  }
  return doc.dump(1) + "\n";
}

HoldoutSplit split_from_manifest(const RatingDataset& source,
                                 std::string_view manifest_json) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(manifest_json);
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("split manifest: ") + e.what());
  }
  std::set<Rating> held;
  try {
    for (const auto& row : doc.at("test")) {
      held.insert({row.at(0).get<UserId>(), row.at(1).get<ItemId>(),
                   row.at(2).get<int>()});
    }
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("split manifest: ") + e.what());
  }
  HoldoutSplit split;
  std::vector<Rating> train;
  std::size_t matched = 0;
  for (const Rating& r : source.triples()) {
    if (held.contains(r)) {
      split.test.push_back(r);
      ++matched;
    } else {
      train.push_back(r);
    }
  }
  if (matched != held.size()) {
    throw DataError("split manifest references triples absent from the dataset");
  }
  split.train = RatingDataset(std::move(train));
  return split;
}

}  // namespace irec::data
