#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace forestflow::detail {

struct CsvRecord {
  std::size_t line = 0;  // 1-based line number in the source text
  std::vector<std::string> fields;
};

// Comma-separated records. Double-quoted fields may contain commas and ""
// escapes; unquoted fields are trimmed. Blank lines are skipped.
std::vector<CsvRecord> parse_csv(std::string_view text);

std::string to_lower(std::string_view s);

}  // namespace forestflow::detail
