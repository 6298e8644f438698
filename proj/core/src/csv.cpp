#include "csv.hpp"

#include <cctype>

#include <fmt/format.h>

#include "forestflow/error.hpp"

namespace forestflow::detail {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

}  // namespace

std::vector<CsvRecord> parse_csv(std::string_view text) {
  std::vector<CsvRecord> records;
  std::size_t line = 1;
  std::size_t pos = 0;
  if (text.substr(0, 3) == "\xEF\xBB\xBF") pos = 3;

  while (pos < text.size()) {
    CsvRecord rec;
    rec.line = line;
    bool blank = true;
    for (;;) {
      std::string field;
      std::size_t start = pos;
      while (pos < text.size() && (text[pos] == ' ' || text[pos] == '\t')) ++pos;
      if (pos < text.size() && text[pos] == '"') {
        ++pos;
        for (;;) {
          if (pos >= text.size()) {
            throw ParseError(fmt::format("line {}: unterminated quoted field", rec.line));
          }
          char c = text[pos++];
          if (c == '"') {
            if (pos < text.size() && text[pos] == '"') {
              field.push_back('"');
              ++pos;
            } else {
              break;
            }
          } else {
            if (c == '\n') ++line;
            field.push_back(c);
          }
        }
        while (pos < text.size() && text[pos] != ',' && text[pos] != '\n') {
          if (!std::isspace(static_cast<unsigned char>(text[pos]))) {
            throw ParseError(fmt::format("line {}: text after closing quote", rec.line));
          }
          ++pos;
        }
        blank = false;
      } else {
        pos = start;
        while (pos < text.size() && text[pos] != ',' && text[pos] != '\n') ++pos;
        field = std::string(trim(text.substr(start, pos - start)));
        if (!field.empty()) blank = false;
      }
      rec.fields.push_back(std::move(field));
      if (pos < text.size() && text[pos] == ',') {
        ++pos;
        blank = false;
        continue;
      }
      break;
    }
    if (pos < text.size() && text[pos] == '\n') ++pos;
    ++line;
    if (!blank) records.push_back(std::move(rec));
  }
  return records;
}

std::string to_lower(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

}  // namespace forestflow::detail
