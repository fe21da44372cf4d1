#include "irec/data/catalog.hpp"

#include <algorithm>
#include <charconv>
#include <sstream>
#include <unordered_set>

#include <fmt/format.h>

#include "irec/common/csv.hpp"
#include "irec/common/files.hpp"

namespace irec::data {

MalformedRow::MalformedRow(std::size_t line, const std::string& what)
    : DataError(fmt::format("line {}: {}", line, what)), line_(line) {}

void ItemCatalog::add(Item item) {
  if (index_.contains(item.id)) {
    throw DataError(fmt::format("duplicate item id {}", item.id));
  }
  if (item.year < kMinYear) {
    throw DataError(
        fmt::format("item {} has year {} before {}", item.id, item.year, kMinYear));
  }
  index_.emplace(item.id, items_.size());
  items_.push_back(std::move(item));
}

const Item* ItemCatalog::find(ItemId id) const {
  const auto it = index_.find(id);
  return it == index_.end() ? nullptr : &items_[it->second];
}

Item* ItemCatalog::find(ItemId id) {
  const auto it = index_.find(id);
  return it == index_.end() ? nullptr : &items_[it->second];
}

const Item& ItemCatalog::at(ItemId id) const {
  const Item* item = find(id);
  if (item == nullptr) throw IndexOutOfRange(fmt::format("unknown item {}", id));
  return *item;
}

namespace {

template <typename T>
bool parse_int(std::string_view s, T& out) {
  const auto* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, out);
  return ec == std::errc() && ptr == end;
}

std::vector<std::string> split_genres(std::string_view field) {
  std::vector<std::string> genres;
  if (field.empty() || field == "(no genres listed)") return genres;
  std::size_t start = 0;
  while (start <= field.size()) {
    const auto bar = field.find('|', start);
    const auto piece = field.substr(start, bar == std::string_view::npos
                                               ? std::string_view::npos
                                               : bar - start);
    if (!piece.empty()) genres.emplace_back(piece);
    if (bar == std::string_view::npos) break;
    start = bar + 1;
  }
  return genres;
}

// "Toy Story (1995)" -> year 1995, title "Toy Story".
bool split_title_year(std::string_view raw, std::string& title, int& year) {
  while (!raw.empty() && raw.back() == ' ') raw.remove_suffix(1);
  if (raw.size() < 6 || raw.back() != ')') return false;
  const auto open = raw.rfind('(');
  if (open == std::string_view::npos || raw.size() - open != 6) return false;
  if (!parse_int(raw.substr(open + 1, 4), year)) return false;
  auto head = raw.substr(0, open);
  while (!head.empty() && head.back() == ' ') head.remove_suffix(1);
  title = std::string(head);
  return true;
}

}  // namespace

CatalogParse parse_catalog_text(std::string_view text) {
  CatalogParse result;
  std::istringstream in{std::string(text)};
  std::string raw;
  std::vector<std::string> fields;
  std::size_t line_no = 0;
  bool saw_header = false;
  while (std::getline(in, raw)) {
    ++line_no;
    const auto line = csv::chomp(raw);
    if (line.empty()) continue;
    if (!saw_header) {
      saw_header = true;
      continue;
    }
    if (!csv::split_line(line, fields)) {
      throw MalformedRow(line_no, "unterminated quote");
    }
    Item item;
    if (fields.size() < 3 || fields.size() > 4 ||
        !parse_int(fields[0], item.id)) {
      throw MalformedRow(line_no, "expected movieId,title,genres[,year]");
    }
    item.genres = split_genres(fields[2]);
    if (fields.size() == 4) {
      item.title = fields[1];
      if (!parse_int(fields[3], item.year)) {
        throw MalformedRow(line_no, "bad year");
      }
      if (item.year < kMinYear) throw MalformedRow(line_no, "year before 1870");
    } else if (!split_title_year(fields[1], item.title, item.year) ||
               item.year < kMinYear) {
      ++result.skipped;
      continue;
    }
    if (result.catalog.contains(item.id)) {
      throw MalformedRow(line_no, fmt::format("duplicate movieId {}", item.id));
    }
    result.catalog.add(std::move(item));
  }
  if (!saw_header) throw EmptyFile("catalog file is empty");
  return result;
}

CatalogParse parse_catalog(const std::filesystem::path& path) {
  return parse_catalog_text(read_file(path));
}

std::string serialize_catalog(const ItemCatalog& catalog) {
  std::string out = "movieId,title,genres,year\n";
  for (const Item& item : catalog.entries()) {
    std::string genres;
    for (std::size_t g = 0; g < item.genres.size(); ++g) {
      if (g > 0) genres.push_back('|');
      genres += item.genres[g];
    }
    out += fmt::format("{},{},{},{}\n", item.id, csv::quote(item.title),
                       csv::quote(genres), item.year);
  }
  return out;
}

ItemCatalog restrict_catalog(const ItemCatalog& catalog,
                             std::span<const ItemId> keep) {
  const std::unordered_set<ItemId> wanted(keep.begin(), keep.end());
  ItemCatalog out;
  for (const Item& item : catalog.entries()) {
    if (wanted.contains(item.id)) out.add(item);
  }
  return out;
}

}  // namespace irec::data
