#pragma once

#include <compare>
#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "irec/common/error.hpp"
#include "irec/common/ids.hpp"
#include "irec/data/catalog.hpp"

namespace irec::data {

inline constexpr int kMinRating = 1;
inline constexpr int kMaxRating = 5;

struct Rating {
  UserId user = 0;
  ItemId item = 0;
  int value = 0;

  friend auto operator<=>(const Rating&, const Rating&) = default;
};

class ItemMismatch : public DataError {
 public:
  using DataError::DataError;
};

// Sparse ratings matrix X, stored as triples sorted by (user, item).
class RatingDataset {
 public:
  RatingDataset() = default;
  // Throws DataError on a duplicate (user, item) pair or a rating outside 1..5.
  explicit RatingDataset(std::vector<Rating> triples);

  std::span<const Rating> triples() const { return triples_; }
  std::size_t size() const { return triples_.size(); }
  bool empty() const { return triples_.empty(); }

  // Sorted distinct ids.
  const std::vector<UserId>& user_ids() const { return users_; }
  const std::vector<ItemId>& item_ids() const { return items_; }
  std::size_t n_users() const { return users_.size(); }
  std::size_t n_items() const { return items_.size(); }

  // Ratings of one user, in item order.
  std::span<const Rating> ratings_of(UserId user) const;

  friend bool operator==(const RatingDataset& a, const RatingDataset& b) {
    return a.triples_ == b.triples_;
  }

 private:
  std::vector<Rating> triples_;
  std::vector<UserId> users_;
  std::vector<ItemId> items_;
};

struct RatingsParse {
  RatingDataset dataset;
  std::size_t dropped_duplicates = 0;
};

// Maps a 0.5..5.0 star rating to 1..5; halves round up, so 0.5 -> 1.
int round_rating(double stars);

// `userId,movieId,rating[,timestamp]` with a header row. Duplicate
// (user, item) rows keep the last occurrence.
RatingsParse parse_ratings_text(std::string_view text);
RatingsParse parse_ratings(const std::filesystem::path& path);

// Canonical `userId,movieId,rating` layout, integer ratings.
std::string serialize_ratings(const RatingDataset& dataset);

// Throws ItemMismatch naming the first item absent from the catalog.
void check_items(const RatingDataset& dataset, const ItemCatalog& catalog);

// Union of a and b with b's user ids shifted by user_offset. b's items must
// all be in the catalog.
RatingDataset merge_datasets(const RatingDataset& a, const RatingDataset& b,
                             UserId user_offset, const ItemCatalog& catalog);

RatingDataset restrict_items(const RatingDataset& dataset,
                             std::span<const ItemId> keep);

}  // namespace irec::data
