#include "attn/csv.hpp"

#include <algorithm>

#include "attn/errors.hpp"

namespace attn {

bool CsvReader::next(std::vector<std::string>& fields) {
  fields.clear();
  std::string line;
  if (!std::getline(in_, line)) return false;
  ++line_;
  record_line_ = line_;

  std::string field;
  bool quoted = false;
  bool field_started = false;
  for (;;) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    for (std::size_t i = 0; i < line.size(); ++i) {
      const char c = line[i];
      if (quoted) {
        if (c == '"') {
          if (i + 1 < line.size() && line[i + 1] == '"') {
            field += '"';
            ++i;
          } else {
            quoted = false;
          }
        } else {
          field += c;
        }
      } else if (c == '"' && !field_started) {
        quoted = true;
        field_started = true;
      } else if (c == ',') {
        fields.push_back(std::move(field));
        field.clear();
        field_started = false;
      } else {
        field += c;
        field_started = true;
      }
    }
    if (!quoted) break;
    // Quoted field spans a newline.
    if (!std::getline(in_, line)) {
      throw DataError("unterminated quoted CSV field starting on line " +
                      std::to_string(record_line_));
    }
    ++line_;
    field += '\n';
  }
  fields.push_back(std::move(field));
  return true;
}

CsvHeader::CsvHeader(std::vector<std::string> names) : names_(std::move(names)) {
  if (!names_.empty() && names_.front().starts_with("\xEF\xBB\xBF")) names_.front().erase(0, 3);
}

std::optional<std::size_t> CsvHeader::find(std::string_view name) const {
  const auto it = std::find(names_.begin(), names_.end(), name);
  if (it == names_.end()) return std::nullopt;
  return static_cast<std::size_t>(it - names_.begin());
}

std::size_t CsvHeader::require(std::string_view name, std::string_view source) const {
  if (auto idx = find(name)) return *idx;
  throw DataError(std::string(source) + ": missing CSV column '" + std::string(name) + "'");
}

void write_csv_field(std::ostream& out, std::string_view field) {
  const bool needs_quotes = field.find_first_of(",\"\r\n") != std::string_view::npos;
  if (!needs_quotes) {
    out << field;
    return;
  }
  out << '"';
  for (char c : field) {
    if (c == '"') out << '"';
    out << c;
  }
  out << '"';
}

void write_csv_row(std::ostream& out, const std::vector<std::string>& fields) {
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) out << ',';
    write_csv_field(out, fields[i]);
  }
  out << '\n';
}

}  // namespace attn
