#include "statclaim/csv.hpp"

#include <fstream>
#include <istream>
#include <ostream>

#include "statclaim/error.hpp"

namespace statclaim::csv {

char detect_delimiter(std::string_view header_line) {
  return header_line.find('\t') != std::string_view::npos ? '\t' : ',';
}

Reader::Reader(std::istream& in, char delimiter) : in_(in), delimiter_(delimiter) {}

bool Reader::next(Record& out) {
  std::string line;
  while (true) {
    if (!std::getline(in_, line)) return false;
    ++line_;
    if (first_) {
      first_ = false;
      if (line.rfind("\xEF\xBB\xBF", 0) == 0) line.erase(0, 3);
    }
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!line.empty()) break;
  }

  out.fields.clear();
  out.line = line_;
  std::string field;
  bool quoted = false;
  std::size_t i = 0;
  while (true) {
    if (i == line.size()) {
      if (!quoted) break;
      // Quoted field spans a newline.
      std::string more;
      if (!std::getline(in_, more)) {
        throw Error(ErrorCode::MalformedRow, "unterminated quoted field", out.line);
      }
      ++line_;
      if (!more.empty() && more.back() == '\r') more.pop_back();
      field.push_back('\n');
      line = std::move(more);
      i = 0;
      continue;
    }
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          field.push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        field.push_back(c);
      }
    } else if (c == '"' && field.empty()) {
      quoted = true;
    } else if (c == delimiter_) {
      out.fields.push_back(std::move(field));
      field.clear();
    } else {
      field.push_back(c);
    }
    ++i;
  }
  out.fields.push_back(std::move(field));
  return true;
}

std::vector<Record> read_file(const std::filesystem::path& path, char* delimiter_out) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot open " + path.string());
  std::string first_line;
  std::getline(in, first_line);
  const char delim = detect_delimiter(first_line);
  if (delimiter_out) *delimiter_out = delim;
  in.clear();
  in.seekg(0);

  std::vector<Record> records;
  Reader reader(in, delim);
  Record rec;
  while (reader.next(rec)) records.push_back(rec);
  return records;
}

std::string escape_field(std::string_view field, char delimiter) {
  const bool needs_quotes = field.find_first_of(std::string{delimiter, '"', '\n', '\r'}) !=
                            std::string_view::npos;
  if (!needs_quotes) return std::string(field);
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

void write_row(std::ostream& out, const std::vector<std::string>& fields, char delimiter) {
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) out.put(delimiter);
    out << escape_field(fields[i], delimiter);
  }
  out.put('\n');
}

}  // namespace statclaim::csv
