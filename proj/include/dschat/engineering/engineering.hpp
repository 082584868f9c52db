#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "dschat/dataset/table.hpp"
#include "dschat/petel/petel.hpp"

namespace dschat::engineering {

using dataset::Dataset;

class UnknownColumn : public ValidationError {
 public:
  UnknownColumn(std::string name, std::vector<std::string> candidates);
  const std::string& name() const noexcept { return name_; }
  const std::vector<std::string>& candidates() const noexcept { return candidates_; }

 private:
  std::string name_;
  std::vector<std::string> candidates_;
};

class TargetInFeatures : public ValidationError {
 public:
  explicit TargetInFeatures(const std::string& column)
      : ValidationError("TargetInFeatures", "the target " + column + " is also listed as a feature") {}
};

class IncompatibleCondition : public ValidationError {
 public:
  IncompatibleCondition(const std::string& column, std::string_view condition, const std::string& why)
      : ValidationError("IncompatibleCondition",
                        "filter " + column + " " + std::string(condition) + ": " + why) {}
};

class DegenerateTarget : public ValidationError {
 public:
  explicit DegenerateTarget(std::size_t distinct)
      : ValidationError("DegenerateTarget", "target has " + std::to_string(distinct) + " distinct value(s), need 2"),
        distinct_(distinct) {}
  std::size_t distinct_count() const noexcept { return distinct_; }

 private:
  std::size_t distinct_;
};

class EmptyAfterFilter : public ValidationError {
 public:
  EmptyAfterFilter() : ValidationError("EmptyAfterFilter", "no rows remain after filtering") {}
};

// Closest column names by edit distance over normalized names, at most k.
std::vector<std::string> nearest_columns(const Dataset& dataset, std::string_view name, std::size_t k = 3);
// Case- and separator-insensitive lookup; throws UnknownColumn.
std::size_t resolve_column(const Dataset& dataset, std::string_view name);

struct DroppedColumn {
  std::string column;
  std::string reason;
  bool operator==(const DroppedColumn&) const = default;
};

struct AttributePlan {
  std::optional<std::string> target;  // absent for unsupervised tasks
  std::vector<std::string> feature_columns;
  std::vector<DroppedColumn> dropped;
};

// Requires a complete PeTEL. features null, skipped or "all" means every column but the target.
AttributePlan petel_to_attributes(const petel::Petel& petel, const Dataset& dataset);

// Rows satisfying every filter. Numeric columns compare numerically; other columns only allow
// equals, not_equals and in, compared as text. Rows missing the filtered cell are dropped.
Dataset apply_filters(const Dataset& dataset, const std::vector<petel::FilterSpec>& filters);

struct ColumnEncoding {
  std::string column;
  std::string kind;  // identity, one_hot or datetime_days
  std::vector<std::string> categories;  // one_hot only, lexical order
  std::size_t first = 0;                // first x column
  std::size_t width = 1;
  std::string fill;  // imputed value, when any cell was missing
  std::size_t imputed = 0;
};

struct PreparedMatrix {
  std::vector<std::string> columns;  // x column names, e.g. sex=F
  std::vector<std::vector<double>> x;
  std::vector<double> y;               // empty for unsupervised tasks
  std::vector<std::string> labels;     // classification: label of each encoded class
  std::vector<ColumnEncoding> encoding;
  std::vector<std::size_t> row_index;  // original row id of each x row
  std::vector<DroppedColumn> dropped;
  std::vector<std::string> notes;
};

// Median / mode imputation, lexical one-hot, label-encoded target. Outliers are kept.
PreparedMatrix prep_data(const Dataset& dataset, const AttributePlan& plan, petel::MlTask task);

// Days since 1970-01-01 for YYYY-MM-DD with an optional time part.
std::optional<double> datetime_days(std::string_view s);

}  // namespace dschat::engineering
