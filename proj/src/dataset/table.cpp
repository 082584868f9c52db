#include "dschat/dataset/table.hpp"

#include <algorithm>
#include <fstream>
#include <regex>
#include <set>
#include <sstream>
#include <unordered_set>

#include "dschat/util/text.hpp"

namespace dschat::dataset {

std::string_view to_string(ColumnKind kind) {
  switch (kind) {
    case ColumnKind::numeric: return "numeric";
    case ColumnKind::categorical: return "categorical";
    case ColumnKind::text: return "text";
    case ColumnKind::datetime: return "datetime";
  }
  return "unknown";
}

std::optional<std::size_t> Dataset::column_index(std::string_view exact_name) const {
  for (std::size_t i = 0; i < columns.size(); ++i) {
    if (columns[i].name == exact_name) return i;
  }
  return std::nullopt;
}

bool Dataset::same_content(const Dataset& other) const {
  return columns == other.columns && rows == other.rows;
}

namespace {

struct Record {
  std::vector<Cell> fields;
  std::size_t line;  // physical line where the record starts, 1-based
  bool blank;        // no characters at all
};

class CsvReader {
 public:
  explicit CsvReader(std::string_view s) : s_(s) {}

  std::optional<Record> next() {
    if (pos_ >= s_.size()) return std::nullopt;
    Record rec{{}, line_, false};
    if (at_newline()) {
      consume_newline();
      rec.blank = true;
      return rec;
    }
    for (;;) {
      std::string field;
      if (s_[pos_] == '"') {
        ++pos_;
        read_quoted(field);
      } else {
        while (pos_ < s_.size() && s_[pos_] != ',' && !at_newline()) field.push_back(s_[pos_++]);
      }
      if (field.empty()) {
        rec.fields.emplace_back(std::nullopt);
      } else {
        rec.fields.emplace_back(std::move(field));
      }
      if (pos_ >= s_.size()) return rec;
      if (s_[pos_] == ',') {
        ++pos_;
        if (pos_ >= s_.size()) {
          rec.fields.emplace_back(std::nullopt);
          return rec;
        }
        continue;
      }
      if (at_newline()) {
        consume_newline();
        return rec;
      }
      throw DecodeError("unexpected character after closing quote on line " + std::to_string(line_));
    }
  }

 private:
  bool at_newline() const { return pos_ < s_.size() && (s_[pos_] == '\n' || s_[pos_] == '\r'); }

  void consume_newline() {
    if (s_[pos_] == '\r' && pos_ + 1 < s_.size() && s_[pos_ + 1] == '\n') ++pos_;
    ++pos_;
    ++line_;
  }

  void read_quoted(std::string& field) {
    const std::size_t start_line = line_;
    for (;;) {
      if (pos_ >= s_.size()) throw DecodeError("unterminated quoted field starting on line " + std::to_string(start_line));
      const char c = s_[pos_];
      if (c == '"') {
        ++pos_;
        if (pos_ < s_.size() && s_[pos_] == '"') {
          field.push_back('"');
          ++pos_;
          continue;
        }
        return;
      }
      if (at_newline()) {
        consume_newline();
        field.push_back('\n');
        continue;
      }
      field.push_back(c);
      ++pos_;
    }
  }

  std::string_view s_;
  std::size_t pos_ = 0;
  std::size_t line_ = 1;
};

bool needs_quotes(const std::string& s) {
  return s.find_first_of(",\"\r\n") != std::string::npos || s.front() == ' ' || s.back() == ' ';
}

std::string quote(const std::string& s) { return "\"" + util::replace_all(s, "\"", "\"\"") + "\""; }

}  // namespace

Dataset load_table(std::string_view bytes, std::string name) {
  if (bytes.size() >= 3 && bytes.substr(0, 3) == "\xEF\xBB\xBF") bytes.remove_prefix(3);
  if (!util::valid_utf8(bytes)) throw DecodeError("input is not valid UTF-8");

  CsvReader reader(bytes);
  std::optional<Record> header;
  while ((header = reader.next()) && header->blank) {
  }
  if (!header) throw EmptyInput();

  Dataset ds;
  ds.name = std::move(name);
  std::set<std::string> seen;
  for (std::size_t i = 0; i < header->fields.size(); ++i) {
    std::string col = header->fields[i] ? util::trim(*header->fields[i]) : std::string();
    if (col.empty()) col = "column_" + std::to_string(i + 1);
    if (!seen.insert(col).second) throw DuplicateColumn(col);
    ds.columns.push_back({col, ColumnKind::categorical});
  }
  while (auto rec = reader.next()) {
    if (rec->blank) continue;
    if (rec->fields.size() != ds.columns.size()) throw RaggedRow(rec->line, rec->fields.size(), ds.columns.size());
    ds.row_ids.push_back(ds.rows.size());
    ds.rows.push_back(std::move(rec->fields));
  }
  infer_kinds(ds);
  return ds;
}

Dataset load_csv_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw NotFoundError("FileNotFound", "cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return load_table(buf.str(), path.stem().string());
}

std::string to_csv(const Dataset& dataset) {
  std::string out;
  auto emit = [&](const Cell& c, bool only_field) {
    if (!c) {
      // A lone empty field would read back as a blank line.
      if (only_field) out += "\"\"";
      return;
    }
    out += needs_quotes(*c) ? quote(*c) : *c;
  };
  for (std::size_t i = 0; i < dataset.columns.size(); ++i) {
    if (i) out += ',';
    emit(dataset.columns[i].name, false);
  }
  out += '\n';
  for (const auto& row : dataset.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out += ',';
      emit(row[i], row.size() == 1);
    }
    out += '\n';
  }
  return out;
}

bool looks_datetime(std::string_view s) {
  static const std::regex re(
      R"((\d{4})-(\d{2})-(\d{2})([T ](\d{2}):(\d{2})(:(\d{2})(\.\d+)?)?(Z|[+-]\d{2}:?\d{2})?)?)");
  std::match_results<std::string_view::const_iterator> m;
  if (!std::regex_match(s.begin(), s.end(), m, re)) return false;
  const int month = std::stoi(m[2].str());
  const int day = std::stoi(m[3].str());
  if (month < 1 || month > 12 || day < 1 || day > 31) return false;
  if (m[5].matched && (std::stoi(m[5].str()) > 23 || std::stoi(m[6].str()) > 59)) return false;
  if (m[8].matched && std::stoi(m[8].str()) > 60) return false;
  return true;
}

ColumnKind infer_kind(const Dataset& dataset, std::size_t column) {
  const std::size_t sample = std::min<std::size_t>(dataset.rows.size(), 1000);
  std::size_t present = 0;
  std::size_t numeric = 0;
  std::size_t dates = 0;
  std::unordered_set<std::string> distinct;
  for (std::size_t r = 0; r < sample; ++r) {
    const Cell& c = dataset.rows[r][column];
    if (!c) continue;
    ++present;
    if (util::parse_number(*c)) ++numeric;
    if (looks_datetime(*c)) ++dates;
    distinct.insert(*c);
  }
  if (present == 0) return ColumnKind::categorical;
  // Integer arithmetic keeps the 95% threshold exact.
  if (numeric * 100 >= present * 95) return ColumnKind::numeric;
  if (dates * 100 >= present * 95) return ColumnKind::datetime;
  const std::size_t limit = std::max<std::size_t>(20, sample * 5 / 100);
  if (distinct.size() <= limit) return ColumnKind::categorical;
  return ColumnKind::text;
}

void infer_kinds(Dataset& dataset) {
  for (std::size_t c = 0; c < dataset.columns.size(); ++c) dataset.columns[c].kind = infer_kind(dataset, c);
}

}  // namespace dschat::dataset
