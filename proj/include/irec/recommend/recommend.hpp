#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <unordered_set>
#include <vector>

#include "irec/common/error.hpp"
#include "irec/common/ids.hpp"
#include "irec/common/rng.hpp"

namespace irec::recommend {

class NoUnratedItems : public DataError {
 public:
  using DataError::DataError;
};

struct RecConfig {
  double threshold = 4.0;
  std::size_t pool_cap = 20;
  std::size_t slate_size = 3;
  std::uint64_t seed = 0;

  // Throws ConfigError unless 1 <= slate_size <= pool_cap.
  void validate() const;
};

struct ScoredItem {
  ItemId item = 0;
  double score = 0.0;

  friend bool operator==(const ScoredItem&, const ScoredItem&) = default;
};

// Unrated items eligible for recommendation, best first (ties: lower id).
struct CandidatePool {
  UserId user = 0;
  std::vector<ScoredItem> entries;
};

struct Slate {
  UserId user = 0;
  std::vector<ScoredItem> items;  // in draw order
};

// (unrated items scoring >= threshold, best first, truncated to pool_cap)
// united with the slate_size best unrated items, whatever their score. Both
// parts are prefixes of the same ranking, so the union is never re-truncated
// and the top items are always present. `scores[k]` belongs to `items[k]`.
CandidatePool build_pool(UserId user, std::span<const double> scores,
                         std::span<const ItemId> items,
                         const std::unordered_set<ItemId>& rated,
                         const RecConfig& config);

// Sequential draws without replacement, each picking a remaining item with
// probability score / (sum of remaining scores). Scores must be positive.
// A pool no larger than slate_size is returned whole, in pool order.
Slate sample_slate(const CandidatePool& pool, const RecConfig& config, Rng& rng);

// The slate_size best pool entries.
Slate top_slate(const CandidatePool& pool, const RecConfig& config);

// Distinct items across all slates.
std::size_t coverage(std::span<const Slate> slates);

// Generator stream for one user: the run seed xor the user id.
Rng user_stream(std::uint64_t seed, UserId user);

// `user_id,rank,item_id,score` with rank starting at 1.
std::string slates_to_csv(std::span<const Slate> slates);
std::string slates_to_json(std::span<const Slate> slates);
std::vector<Slate> slates_from_csv(std::string_view text);
// Array of {"strategy", "distinct_items", "catalog_size"}, sampled then top.
std::string coverage_json(std::size_t sampled_distinct, std::size_t top_distinct,
                          std::size_t catalog_size);

}  // namespace irec::recommend
