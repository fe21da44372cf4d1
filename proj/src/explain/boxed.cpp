#include "irec/explain/boxed.hpp"

namespace irec::explain {

namespace {

constexpr std::string_view kOpen = "\\boxed{";

// Index one past the closing brace matching the brace just before `from`, or
// npos when the text ends first.
std::size_t match_brace(std::string_view text, std::size_t from) {
  int depth = 1;
  for (std::size_t k = from; k < text.size(); ++k) {
    const char c = text[k];
    if (c == '\\' && k + 1 < text.size() && (text[k + 1] == '{' || text[k + 1] == '}')) {
      ++k;
    } else if (c == '{') {
      ++depth;
    } else if (c == '}' && --depth == 0) {
      return k + 1;
    }
  }
  return std::string_view::npos;
}

}  // namespace

std::optional<BoxedAnswer> find_boxed(std::string_view raw) {
  std::optional<BoxedAnswer> found;
  std::size_t pos = 0;
  while ((pos = raw.find(kOpen, pos)) != std::string_view::npos) {
    const std::size_t body = pos + kOpen.size();
    const std::size_t end = match_brace(raw, body);
    if (end == std::string_view::npos) {
      pos = body;
      continue;
    }
    found = BoxedAnswer{std::string(raw.substr(0, pos)),
                        std::string(raw.substr(body, end - 1 - body))};
    pos = end;
  }
  return found;
}

BoxedAnswer extract_boxed(std::string_view raw) {
  auto found = find_boxed(raw);
  if (!found) throw NoBoxedAnswer("reply has no complete \\boxed{...} answer");
  return std::move(*found);
}

}  // namespace irec::explain
