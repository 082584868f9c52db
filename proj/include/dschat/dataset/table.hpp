#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "dschat/errors.hpp"

namespace dschat::dataset {

enum class ColumnKind { numeric, categorical, text, datetime };

std::string_view to_string(ColumnKind kind);

struct Column {
  std::string name;
  ColumnKind kind = ColumnKind::categorical;
  bool operator==(const Column&) const = default;
};

// nullopt is a missing cell. Only an empty field is missing.
using Cell = std::optional<std::string>;
using Row = std::vector<Cell>;

struct Dataset {
  std::string name;
  std::vector<Column> columns;
  std::vector<Row> rows;
  // Position of each row in the originally loaded table; survives filtering.
  std::vector<std::size_t> row_ids;

  std::size_t row_count() const { return rows.size(); }
  std::size_t column_count() const { return columns.size(); }
  std::optional<std::size_t> column_index(std::string_view exact_name) const;
  // Same column/row content, ignoring the name.
  bool same_content(const Dataset& other) const;
};

class DecodeError : public ValidationError {
 public:
  explicit DecodeError(const std::string& what) : ValidationError("DecodeError", what) {}
};

class RaggedRow : public ValidationError {
 public:
  RaggedRow(std::size_t line, std::size_t got, std::size_t want)
      : ValidationError("RaggedRow", "line " + std::to_string(line) + " has " + std::to_string(got) +
                                         " fields, header has " + std::to_string(want)),
        line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

class EmptyInput : public ValidationError {
 public:
  EmptyInput() : ValidationError("EmptyInput", "input contains no header record") {}
};

class DuplicateColumn : public ValidationError {
 public:
  explicit DuplicateColumn(std::string name)
      : ValidationError("DuplicateColumn", "duplicate column name: " + name), name_(std::move(name)) {}
  const std::string& name() const noexcept { return name_; }

 private:
  std::string name_;
};

class EmptyDataset : public ValidationError {
 public:
  EmptyDataset() : ValidationError("EmptyDataset", "dataset has no rows") {}
};

// RFC-4180 CSV with a header record. Handles a UTF-8 BOM, CRLF or LF line ends,
// quoted fields with embedded commas, quotes and newlines. Lines that are entirely
// empty are skipped.
Dataset load_table(std::string_view bytes, std::string name = "dataset");
Dataset load_csv_file(const std::filesystem::path& path);

// Inverse of load_table (LF line ends, minimal quoting).
std::string to_csv(const Dataset& dataset);

// Kind rules over at most the first 1000 rows: numeric if >= 95% of present cells parse
// as numbers, datetime if >= 95% are ISO-8601 dates, categorical if the distinct count is
// at most max(20, 5% of sampled rows), else text. A column with no present cells is categorical.
ColumnKind infer_kind(const Dataset& dataset, std::size_t column);
void infer_kinds(Dataset& dataset);

bool looks_datetime(std::string_view s);

}  // namespace dschat::dataset
