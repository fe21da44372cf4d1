#include "irec/common/url.hpp"

#include "irec/common/error.hpp"

namespace irec {

UrlParts split_url(std::string_view url) {
  const auto scheme_end = url.find("://");
  if (scheme_end == std::string_view::npos) {
    throw ConfigError("endpoint URL needs a scheme: " + std::string(url));
  }
  const auto path_start = url.find('/', scheme_end + 3);
  UrlParts parts;
  if (path_start == std::string_view::npos) {
    parts.origin = std::string(url);
  } else {
    parts.origin = std::string(url.substr(0, path_start));
    parts.base_path = std::string(url.substr(path_start));
  }
  while (!parts.base_path.empty() && parts.base_path.back() == '/') {
    parts.base_path.pop_back();
  }
  return parts;
}

}  // namespace irec
