#include "irec/data/ratings.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <map>
#include <sstream>
#include <unordered_set>

#include <fmt/format.h>

#include "irec/common/csv.hpp"
#include "irec/common/files.hpp"

namespace irec::data {

RatingDataset::RatingDataset(std::vector<Rating> triples)
    : triples_(std::move(triples)) {
  std::sort(triples_.begin(), triples_.end());
  for (std::size_t k = 0; k < triples_.size(); ++k) {
    const Rating& r = triples_[k];
    if (r.value < kMinRating || r.value > kMaxRating) {
      throw DataError(fmt::format("rating {} for ({}, {}) outside 1..5", r.value,
                                  r.user, r.item));
    }
    if (k > 0 && triples_[k - 1].user == r.user && triples_[k - 1].item == r.item) {
      throw DataError(fmt::format("duplicate pair ({}, {})", r.user, r.item));
    }
    if (users_.empty() || users_.back() != r.user) users_.push_back(r.user);
    items_.push_back(r.item);
  }
  std::sort(items_.begin(), items_.end());
  items_.erase(std::unique(items_.begin(), items_.end()), items_.end());
}

std::span<const Rating> RatingDataset::ratings_of(UserId user) const {
  const auto lo = std::lower_bound(
      triples_.begin(), triples_.end(), user,
      [](const Rating& r, UserId u) { return r.user < u; });
  auto hi = lo;
  while (hi != triples_.end() && hi->user == user) ++hi;
  return {lo, hi};
}

int round_rating(double stars) {
  const int rounded = static_cast<int>(std::floor(stars + 0.5));
  return std::clamp(rounded, kMinRating, kMaxRating);
}

namespace {

template <typename T>
bool parse_number(std::string_view s, T& out) {
  const auto* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, out);
  return ec == std::errc() && ptr == end;
}

}  // namespace

RatingsParse parse_ratings_text(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string raw;
  std::vector<std::string> fields;
  std::size_t line_no = 0;
  bool saw_header = false;
  // Keyed on (user, item) so the last occurrence overwrites earlier ones.
  std::map<std::pair<UserId, ItemId>, int> cells;
  std::size_t rows = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const auto line = csv::chomp(raw);
    if (line.empty()) continue;
    if (!saw_header) {
      saw_header = true;
      continue;
    }
    if (!csv::split_line(line, fields) || fields.size() < 3 || fields.size() > 4) {
      throw MalformedRow(line_no, "expected userId,movieId,rating[,timestamp]");
    }
    UserId user = 0;
    ItemId item = 0;
    double stars = 0.0;
    if (!parse_number(fields[0], user) || !parse_number(fields[1], item) ||
        !parse_number(fields[2], stars)) {
      throw MalformedRow(line_no, "non-numeric field");
    }
    if (!std::isfinite(stars) || stars < 0.5 || stars > 5.0) {
      throw MalformedRow(line_no, fmt::format("rating {} outside 0.5..5", stars));
    }
    cells[{user, item}] = round_rating(stars);
    ++rows;
  }
  if (!saw_header) throw EmptyFile("ratings file is empty");

  std::vector<Rating> triples;
  triples.reserve(cells.size());
  for (const auto& [key, value] : cells) {
    triples.push_back({key.first, key.second, value});
  }
  return {RatingDataset(std::move(triples)), rows - cells.size()};
}

RatingsParse parse_ratings(const std::filesystem::path& path) {
  return parse_ratings_text(read_file(path));
}

std::string serialize_ratings(const RatingDataset& dataset) {
  std::string out = "userId,movieId,rating\n";
  out.reserve(out.size() + dataset.size() * 16);
  for (const Rating& r : dataset.triples()) {
    out += fmt::format("{},{},{}\n", r.user, r.item, r.value);
  }
  return out;
}

void check_items(const RatingDataset& dataset, const ItemCatalog& catalog) {
  for (const ItemId item : dataset.item_ids()) {
    if (!catalog.contains(item)) {
      throw ItemMismatch(fmt::format("item {} is not in the catalog", item));
    }
  }
}

RatingDataset merge_datasets(const RatingDataset& a, const RatingDataset& b,
                             UserId user_offset, const ItemCatalog& catalog) {
  if (!a.user_ids().empty() && user_offset < a.user_ids().back()) {
    throw DataError(fmt::format("user offset {} is below the largest user id {}",
                                user_offset, a.user_ids().back()));
  }
  check_items(b, catalog);
  std::vector<Rating> merged(a.triples().begin(), a.triples().end());
  merged.reserve(a.size() + b.size());
  for (Rating r : b.triples()) {
    r.user += user_offset;
    merged.push_back(r);
  }
  return RatingDataset(std::move(merged));
}

RatingDataset restrict_items(const RatingDataset& dataset,
                             std::span<const ItemId> keep) {
  const std::unordered_set<ItemId> wanted(keep.begin(), keep.end());
  std::vector<Rating> kept;
  for (const Rating& r : dataset.triples()) {
    if (wanted.contains(r.item)) kept.push_back(r);
  }
  return RatingDataset(std::move(kept));
}

}  // namespace irec::data
