#pragma once

#include <optional>
#include <string>
#include <string_view>

#include "irec/common/error.hpp"

namespace irec::explain {

class NoBoxedAnswer : public DataError {
 public:
  using DataError::DataError;
};

struct BoxedAnswer {
  std::string reasoning;  // everything before the answer span, <think> included
  std::string final;      // content between the braces of the last \boxed{...}
};

// Scans left to right for `\boxed{` and matches braces (backslash-escaped
// braces do not count). A complete span swallows any boxed spans nested in
// it; the last complete span wins.
std::optional<BoxedAnswer> find_boxed(std::string_view raw);

// As find_boxed, but throws NoBoxedAnswer when there is no complete span.
BoxedAnswer extract_boxed(std::string_view raw);

}  // namespace irec::explain
