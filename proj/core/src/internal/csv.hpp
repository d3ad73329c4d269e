#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace styledrift::internal {

struct CsvRow {
  std::vector<std::string> fields;
  std::size_t line_no = 0;  // 1-based line the record starts on
};

// RFC 4180 parser: quoted fields with "" escapes, embedded newlines and
// commas allowed inside quotes. Accepts \r\n and \n row terminators.
inline std::vector<CsvRow> parse_csv(std::string_view content) {
  std::vector<CsvRow> rows;
  CsvRow row;
  row.line_no = 1;
  std::string field;
  bool in_quotes = false;
  bool row_has_data = false;
  std::size_t line = 1;

  auto end_field = [&]() {
    row.fields.push_back(std::move(field));
    field.clear();
  };
  auto end_row = [&]() {
    end_field();
    rows.push_back(std::move(row));
    row = CsvRow{};
    row.line_no = line;
    row_has_data = false;
  };

  for (std::size_t i = 0; i < content.size(); ++i) {
    char c = content[i];
    if (c == '\n') ++line;
    if (in_quotes) {
      if (c == '"') {
        if (i + 1 < content.size() && content[i + 1] == '"') {
          field.push_back('"');
          ++i;
        } else {
          in_quotes = false;
        }
      } else {
        field.push_back(c);
      }
      row_has_data = true;
      continue;
    }
    switch (c) {
      case '"':
        in_quotes = true;
        row_has_data = true;
        break;
      case ',':
        end_field();
        row_has_data = true;
        break;
      case '\r':
        break;
      case '\n':
        if (row_has_data || !row.fields.empty()) {
          end_row();
        } else {
          row.line_no = line;  // skip blank line
        }
        break;
      default:
        field.push_back(c);
        row_has_data = true;
        break;
    }
  }
  if (row_has_data || !row.fields.empty()) {
    row.fields.push_back(std::move(field));
    rows.push_back(std::move(row));
  }
  return rows;
}

inline std::string csv_escape(std::string_view field) {
  bool needs_quotes = field.find_first_of(",\"\n\r") != std::string_view::npos;
  if (!needs_quotes) return std::string(field);
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

inline std::string csv_join(const std::vector<std::string>& fields) {
  std::string out;
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) out.push_back(',');
    out += csv_escape(fields[i]);
  }
  return out;
}

}  // namespace styledrift::internal
