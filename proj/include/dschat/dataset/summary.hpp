#pragma once

#include <string>
#include <vector>

#include "dschat/dataset/miniature.hpp"
#include "dschat/gateway/gateway.hpp"
#include "dschat/json.hpp"
#include "dschat/petel/ml_task.hpp"

namespace dschat::dataset {

struct ColumnDescription {
  std::string name;
  std::string description;
  bool operator==(const ColumnDescription&) const = default;
};

struct DatasetSummary {
  std::string summary;
  std::vector<ColumnDescription> columns;
  std::string row;
  std::string trend;
  std::vector<std::string> warnings;

  Json to_json() const;
  static DatasetSummary from_json(const Json& j);
  // Plain-text form bound to {summary} and {dataset_summary}.
  std::string render() const;
};

class SchemaViolation : public ValidationError {
 public:
  explicit SchemaViolation(std::vector<std::string> missing);
  const std::vector<std::string>& missing() const noexcept { return missing_; }

 private:
  std::vector<std::string> missing_;
};

// Reads a summarizer reply; accepts dataset_summary / sample row style key variants.
// `missing` receives the absent or empty parts among summary, columns, row, trend.
DatasetSummary parse_dataset_summary(const Json& reply, std::vector<std::string>& missing);

// Column descriptions naming no dataset column (separator-insensitive) become warnings.
DatasetSummary summarize_dataset(const MiniDataset& mini, const gateway::Gateway& gw, const Dataset* dataset = nullptr);

struct SuggestedTask {
  petel::MlTask task;
  std::string rationale;
  std::string example_formulation;
};

struct TaskSuggestion {
  std::vector<SuggestedTask> tasks;
  std::string raw_text;

  Json to_json() const;
  static TaskSuggestion from_json(const Json& j);
};

class TooFewTasks : public ValidationError {
 public:
  explicit TooFewTasks(std::size_t found)
      : ValidationError("TooFewTasks", "expected at least 2 suggested tasks, found " + std::to_string(found)),
        found_(found) {}
  std::size_t found() const noexcept { return found_; }

 private:
  std::size_t found_;
};

// Scans free text for task names. Each task's rationale is the first paragraph that
// mentions it, without a leading list heading; tasks keep order of first mention.
TaskSuggestion parse_task_suggestion(const std::string& text);

TaskSuggestion suggest_tasks(const DatasetSummary& summary, const gateway::Gateway& gw);

}  // namespace dschat::dataset
