#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "dschat/dataset/table.hpp"

namespace dschat::dataset {

inline constexpr std::size_t kDefaultBudget = 4000;
inline constexpr std::size_t kMinBudget = 500;
inline constexpr std::size_t kHeadRows = 5;
inline constexpr std::size_t kSampleRows = 20;

struct ColumnStats {
  std::string name;
  ColumnKind kind = ColumnKind::categorical;
  double missing_fraction = 0;
  std::size_t distinct_count = 0;
  std::optional<double> min;  // numeric columns only
  std::optional<double> max;
  std::vector<std::pair<std::string, std::size_t>> top;  // up to 3, non-numeric columns
};

struct MiniDataset {
  std::string name;
  std::vector<std::string> header;
  std::vector<Row> sample_rows;
  std::vector<std::size_t> sample_row_ids;
  std::vector<ColumnStats> stats;
  std::size_t total_rows = 0;
  std::string rendered;
  std::uint64_t seed = 0;
  std::size_t budget = kDefaultBudget;
  bool truncated = false;
};

std::vector<ColumnStats> column_stats(const Dataset& dataset);

// Head rows, then a seeded uniform sample of further rows in table order, then stats.
// Sample rows are dropped from the tail (then head rows) until the render fits the budget;
// if the stats alone overflow, the text is cut and ends with "# truncated".
MiniDataset miniaturize(const Dataset& dataset, std::size_t budget_chars = kDefaultBudget, std::uint64_t seed = 0);

// Indices drawn without replacement from [lo, hi), ascending. Pure function of the seed.
std::vector<std::size_t> seeded_sample(std::size_t lo, std::size_t hi, std::size_t count, std::uint64_t seed);

}  // namespace dschat::dataset
