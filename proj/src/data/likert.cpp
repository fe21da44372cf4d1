#include "irec/data/likert.hpp"

#include <set>

#include <fmt/format.h>

namespace irec::data {

namespace {

// Accept typographic apostrophes (U+2019) and surrounding blanks.
std::string normalize(std::string_view label) {
  std::string out;
  for (std::size_t i = 0; i < label.size(); ++i) {
    if (label.compare(i, 3, "\xE2\x80\x99") == 0) {
      out.push_back('\'');
      i += 2;
    } else {
      out.push_back(label[i]);
    }
  }
  const auto first = out.find_first_not_of(" \t");
  const auto last = out.find_last_not_of(" \t");
  return first == std::string::npos ? std::string() : out.substr(first, last - first + 1);
}

}  // namespace

LikertScale::LikertScale(std::array<std::string, 5> labels)
    : labels_(std::move(labels)) {
  std::set<std::string> seen;
  for (auto& l : labels_) {
    l = normalize(l);
    if (l.empty() || !seen.insert(l).second) {
      throw std::invalid_argument("Likert labels must be distinct and non-empty");
    }
  }
}

int LikertScale::score(std::string_view label) const {
  const std::string key = normalize(label);
  for (std::size_t k = 0; k < labels_.size(); ++k) {
    if (labels_[k] == key) return static_cast<int>(5 - k);
  }
  throw UnknownLabel(fmt::format("unknown Likert label '{}'", label));
}

const std::string& LikertScale::label(int score) const {
  if (score < 1 || score > 5) {
    throw IndexOutOfRange(fmt::format("Likert score {} outside 1..5", score));
  }
  return labels_[static_cast<std::size_t>(5 - score)];
}

const LikertScale& LikertScale::opinion() {
  static const LikertScale scale({"I really like it", "I like it", "It's okay",
                                  "I don't like it much",
                                  "I really don't like it"});
  return scale;
}

const LikertScale& LikertScale::agreement() {
  static const LikertScale scale({"Strongly agree", "Somewhat agree",
                                  "Neither agree nor disagree",
                                  "Somewhat disagree", "Strongly disagree"});
  return scale;
}

int likert_to_score(std::string_view label, const LikertScale& scale) {
  return scale.score(label);
}

}  // namespace irec::data
