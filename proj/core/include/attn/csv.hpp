#pragma once

#include <cstddef>
#include <istream>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

namespace attn {

// Minimal RFC-4180 reader: quoted fields, doubled quotes, CRLF, embedded
// newlines inside quotes.
class CsvReader {
 public:
  explicit CsvReader(std::istream& in) : in_(in) {}

  // Reads the next record. Returns false at end of input. line() reports the
  // physical line on which the record started (1-based).
  bool next(std::vector<std::string>& fields);
  std::size_t line() const { return record_line_; }

 private:
  std::istream& in_;
  std::size_t line_ = 0;
  std::size_t record_line_ = 0;
};

// Header-aware view of a CSV record.
class CsvHeader {
 public:
  explicit CsvHeader(std::vector<std::string> names);
  std::optional<std::size_t> find(std::string_view name) const;
  std::size_t require(std::string_view name, std::string_view source) const;
  std::size_t size() const { return names_.size(); }

 private:
  std::vector<std::string> names_;
};

void write_csv_field(std::ostream& out, std::string_view field);
void write_csv_row(std::ostream& out, const std::vector<std::string>& fields);

}  // namespace attn
