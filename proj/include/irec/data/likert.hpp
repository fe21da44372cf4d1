#pragma once

#include <array>
#include <string>
#include <string_view>

#include "irec/common/error.hpp"

namespace irec::data {

class UnknownLabel : public DataError {
 public:
  using DataError::DataError;
};

// Five ordered labels, most positive first; the first maps to 5.
class LikertScale {
 public:
  explicit LikertScale(std::array<std::string, 5> labels_most_positive_first);

  int score(std::string_view label) const;
  const std::string& label(int score) const;

  // Movie opinion scale used for training ratings and U2.
  static const LikertScale& opinion();
  // Agreement scale used for the explanation questions.
  static const LikertScale& agreement();

 private:
  std::array<std::string, 5> labels_;
};

int likert_to_score(std::string_view label, const LikertScale& scale);

}  // namespace irec::data
