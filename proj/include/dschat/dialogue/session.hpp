#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "dschat/dataset/summary.hpp"
#include "dschat/dataset/table.hpp"
#include "dschat/dialogue/state.hpp"
#include "dschat/dialogue/summarizer.hpp"
#include "dschat/json.hpp"
#include "dschat/petel/petel.hpp"
#include "dschat/results/results.hpp"

namespace dschat::dialogue {

struct Session {
  std::string id;
  std::string created_at;
  DialogueState state = DialogueState::data_visualization;
  std::string context;  // running dialogue summary
  int turn_count = 0;
  std::vector<Turn> history;

  std::shared_ptr<const dataset::Dataset> dataset;  // immutable once uploaded
  std::optional<dataset::DatasetSummary> summary;
  std::optional<dataset::TaskSuggestion> suggestions;
  std::optional<petel::MlTask> selected_task;
  std::optional<petel::Petel> petel;
  bool awaiting_confirmation = false;  // the last reply described the PeTEL and asked to go ahead
  std::optional<results::ResultSummary> results;

  // Everything but the dataset rows; the dataset is referenced by name.
  Json snapshot() const;
  // Restores a snapshot; `data` is attached as the dataset when given.
  static Session from_snapshot(const Json& j, std::shared_ptr<const dataset::Dataset> data = nullptr);
};

}  // namespace dschat::dialogue
