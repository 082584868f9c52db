#include "dschat/dialogue/state.hpp"

#include <algorithm>
#include <map>

#include "dschat/util/text.hpp"

namespace dschat::dialogue {

std::string_view to_string(DialogueState s) {
  switch (s) {
    case DialogueState::data_visualization: return "data_visualization";
    case DialogueState::task_selection: return "task_selection";
    case DialogueState::task_formulation: return "task_formulation";
    case DialogueState::model_training: return "model_training";
  }
  return "data_visualization";
}

std::string_view alias(DialogueState s) {
  switch (s) {
    case DialogueState::data_visualization: return "dataset_understanding";
    case DialogueState::task_selection: return "problem_selection";
    default: return to_string(s);
  }
}

std::optional<DialogueState> normalize_state(std::string_view name) {
  static const std::map<std::string, DialogueState> names = {
      {"data_visualization", DialogueState::data_visualization},
      {"dataset_understanding", DialogueState::data_visualization},
      {"data_understanding", DialogueState::data_visualization},
      {"dataset_visualization", DialogueState::data_visualization},
      {"task_selection", DialogueState::task_selection},
      {"problem_selection", DialogueState::task_selection},
      {"ask_selection", DialogueState::task_selection},
      {"task_formulation", DialogueState::task_formulation},
      {"problem_formulation", DialogueState::task_formulation},
      {"model_training", DialogueState::model_training},
      {"task_execution", DialogueState::model_training},
      {"problem_execution", DialogueState::model_training},
  };
  auto it = names.find(util::normalize_name(util::trim(name)));
  if (it == names.end()) return std::nullopt;
  return it->second;
}

std::vector<DialogueState> allowed_next(DialogueState s) {
  switch (s) {
    case DialogueState::data_visualization: return {DialogueState::data_visualization, DialogueState::task_selection};
    case DialogueState::task_selection: return {DialogueState::task_selection, DialogueState::task_formulation};
    case DialogueState::task_formulation: return {DialogueState::task_formulation, DialogueState::model_training};
    case DialogueState::model_training: return {DialogueState::model_training};
  }
  return {s};
}

bool is_allowed(DialogueState from, DialogueState to) {
  const auto next = allowed_next(from);
  return std::find(next.begin(), next.end(), to) != next.end();
}

std::string_view display_name(Intent i) {
  switch (i) {
    case Intent::get_dataset_info: return "Get dataset info";
    case Intent::get_dataset_trend: return "Get dataset trend";
    case Intent::select_problem: return "Select problem";
    case Intent::formulate_problem: return "Formulate problem";
    case Intent::problem_execution: return "Problem execution";
    case Intent::chitchat: return "Chitchat";
  }
  return "Chitchat";
}

std::string_view to_string(Intent i) {
  switch (i) {
    case Intent::get_dataset_info: return "get_dataset_info";
    case Intent::get_dataset_trend: return "get_dataset_trend";
    case Intent::select_problem: return "select_problem";
    case Intent::formulate_problem: return "formulate_problem";
    case Intent::problem_execution: return "problem_execution";
    case Intent::chitchat: return "chitchat";
  }
  return "chitchat";
}

std::optional<Intent> parse_intent(std::string_view text) {
  const std::string key = util::normalize_name(util::trim(text));
  for (Intent i : kAllIntents) {
    if (key == to_string(i)) return i;
  }
  return std::nullopt;
}

}  // namespace dschat::dialogue
