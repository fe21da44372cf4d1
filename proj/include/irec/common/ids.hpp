#pragma once

#include <cstdint>

namespace irec {

using UserId = std::int64_t;
using ItemId = std::int64_t;

}  // namespace irec
