#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace statclaim::csv {

/// One parsed record and the 1-based line it started on.
struct Record {
  std::vector<std::string> fields;
  long line = 0;
};

/// Comma unless the header line contains a tab.
char detect_delimiter(std::string_view header_line);

/// RFC 4180 style reader: quoted fields may contain the delimiter, doubled
/// quotes and newlines. A UTF-8 BOM on the first line is dropped.
class Reader {
 public:
  explicit Reader(std::istream& in, char delimiter = ',');

  /// False at end of input. Blank lines are skipped.
  bool next(Record& out);

 private:
  std::istream& in_;
  char delimiter_;
  long line_ = 0;
  bool first_ = true;
};

/// Reads the whole file, auto-detecting the delimiter from its first line.
std::vector<Record> read_file(const std::filesystem::path& path, char* delimiter_out = nullptr);

std::string escape_field(std::string_view field, char delimiter = ',');
void write_row(std::ostream& out, const std::vector<std::string>& fields, char delimiter = ',');

}  // namespace statclaim::csv
