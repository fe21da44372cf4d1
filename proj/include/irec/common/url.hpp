#pragma once

#include <string>
#include <string_view>

namespace irec {

// "https://host:port/v1" -> origin "https://host:port", base_path "/v1".
struct UrlParts {
  std::string origin;
  std::string base_path;
};

UrlParts split_url(std::string_view url);

}  // namespace irec
