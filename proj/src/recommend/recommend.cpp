#include "irec/recommend/recommend.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <map>
#include <sstream>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "irec/common/csv.hpp"

namespace irec::recommend {

void RecConfig::validate() const {
  if (slate_size < 1) throw ConfigError("slate_size must be >= 1");
  if (pool_cap < slate_size) throw ConfigError("pool_cap must be >= slate_size");
  if (!std::isfinite(threshold)) throw ConfigError("threshold must be finite");
}

namespace {

bool better(const ScoredItem& a, const ScoredItem& b) {
  if (a.score != b.score) return a.score > b.score;
  return a.item < b.item;
}

}  // namespace

CandidatePool build_pool(UserId user, std::span<const double> scores,
                         std::span<const ItemId> items,
                         const std::unordered_set<ItemId>& rated,
                         const RecConfig& config) {
  config.validate();
  if (scores.size() != items.size()) {
    throw DimensionMismatch(fmt::format("{} scores for {} items", scores.size(), items.size()));
  }
  std::vector<ScoredItem> unrated;
  for (std::size_t k = 0; k < items.size(); ++k) {
    if (!rated.contains(items[k])) unrated.push_back({items[k], scores[k]});
  }
  if (unrated.empty()) {
    throw NoUnratedItems(fmt::format("user {} has rated every item", user));
  }
  std::sort(unrated.begin(), unrated.end(), better);

  CandidatePool pool{user, {}};
  for (const auto& entry : unrated) {
    if (entry.score < config.threshold || pool.entries.size() == config.pool_cap) break;
    pool.entries.push_back(entry);
  }
  // Sorted input: the above-threshold prefix and the top-k prefix overlap, so
  // the union is just the longer prefix.
  const std::size_t top = std::min(config.slate_size, unrated.size());
  if (pool.entries.size() < top) {
    pool.entries.assign(unrated.begin(), unrated.begin() + static_cast<std::ptrdiff_t>(top));
  }
  return pool;
}

Slate sample_slate(const CandidatePool& pool, const RecConfig& config, Rng& rng) {
  Slate slate{pool.user, {}};
  if (pool.entries.size() <= config.slate_size) {
    slate.items = pool.entries;
    return slate;
  }
  std::vector<ScoredItem> remaining = pool.entries;
  for (const auto& e : remaining) {
    if (!(e.score > 0.0) || !std::isfinite(e.score)) {
      throw DataError(fmt::format("item {} has non-positive score {}", e.item, e.score));
    }
  }
  for (std::size_t draw = 0; draw < config.slate_size; ++draw) {
    double total = 0.0;
    for (const auto& e : remaining) total += e.score;
    const double target = rng.uniform() * total;
    std::size_t pick = remaining.size() - 1;
    double cumulative = 0.0;
    for (std::size_t k = 0; k < remaining.size(); ++k) {
      cumulative += remaining[k].score;
      if (target < cumulative) {
        pick = k;
        break;
      }
    }
    slate.items.push_back(remaining[pick]);
    remaining.erase(remaining.begin() + static_cast<std::ptrdiff_t>(pick));
  }
  return slate;
}

Slate top_slate(const CandidatePool& pool, const RecConfig& config) {
  Slate slate{pool.user, {}};
  const std::size_t n = std::min(config.slate_size, pool.entries.size());
  slate.items.assign(pool.entries.begin(), pool.entries.begin() + static_cast<std::ptrdiff_t>(n));
  return slate;
}

std::size_t coverage(std::span<const Slate> slates) {
  std::unordered_set<ItemId> seen;
  for (const auto& slate : slates) {
    for (const auto& e : slate.items) seen.insert(e.item);
  }
  return seen.size();
}

Rng user_stream(std::uint64_t seed, UserId user) {
  return Rng::for_stream(seed, static_cast<std::uint64_t>(user));
}

std::string slates_to_csv(std::span<const Slate> slates) {
  std::string out = "user_id,rank,item_id,score\n";
  for (const auto& slate : slates) {
    for (std::size_t k = 0; k < slate.items.size(); ++k) {
      out += fmt::format("{},{},{},{}\n", slate.user, k + 1, slate.items[k].item,
                         slate.items[k].score);
    }
  }
  return out;
}

std::string slates_to_json(std::span<const Slate> slates) {
  auto doc = nlohmann::json::array();
  for (const auto& slate : slates) {
    auto items = nlohmann::json::array();
    for (const auto& e : slate.items) items.push_back({{"item_id", e.item}, {"score", e.score}});
    doc.push_back({{"user_id", slate.user}, {"items", std::move(items)}});
  }
  return doc.dump(1) + "\n";
}

std::vector<Slate> slates_from_csv(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string raw;
  std::vector<std::string> fields;
  std::map<UserId, std::map<std::size_t, ScoredItem>> rows;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const auto line = csv::chomp(raw);
    if (line_no == 1 || line.empty()) continue;
    UserId user = 0;
    std::size_t rank = 0;
    ScoredItem e;
    auto num = [](const std::string& s, auto& out) {
      return std::from_chars(s.data(), s.data() + s.size(), out).ec == std::errc();
    };
    if (!csv::split_line(line, fields) || fields.size() != 4 || !num(fields[0], user) ||
        !num(fields[1], rank) || !num(fields[2], e.item) || !num(fields[3], e.score)) {
      throw DataError(fmt::format("slates line {}: expected user_id,rank,item_id,score", line_no));
    }
    rows[user][rank] = e;
  }
  std::vector<Slate> slates;
  for (auto& [user, ranked] : rows) {
    Slate slate{user, {}};
    for (auto& [rank, e] : ranked) slate.items.push_back(e);
    slates.push_back(std::move(slate));
  }
  return slates;
}

std::string coverage_json(std::size_t sampled_distinct, std::size_t top_distinct,
                          std::size_t catalog_size) {
  nlohmann::ordered_json doc = nlohmann::ordered_json::array();
  for (const auto& [strategy, distinct] :
       {std::pair<const char*, std::size_t>{"sampled", sampled_distinct}, {"top", top_distinct}}) {
    doc.push_back({{"strategy", strategy},
                   {"distinct_items", distinct},
                   {"catalog_size", catalog_size}});
  }
  return doc.dump(2) + "\n";
}

}  // namespace irec::recommend
