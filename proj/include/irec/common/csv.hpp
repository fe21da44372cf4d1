#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace irec::csv {

// Splits one CSV record. Double-quoted fields may contain commas and doubled
// quotes. Returns false on an unterminated quote.
bool split_line(std::string_view line, std::vector<std::string>& fields);

// Quotes a field only when it contains a comma, quote or newline.
std::string quote(std::string_view field);

// Strips a trailing '\r' left by CRLF files.
std::string_view chomp(std::string_view line);

}  // namespace irec::csv
