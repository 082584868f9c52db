#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace dschat::dialogue {

enum class DialogueState { data_visualization, task_selection, task_formulation, model_training };

inline constexpr std::array<DialogueState, 4> kAllStates = {
    DialogueState::data_visualization, DialogueState::task_selection, DialogueState::task_formulation,
    DialogueState::model_training};

std::string_view to_string(DialogueState s);
// The name the detector demonstrations use: dataset_understanding, problem_selection; others as-is.
std::string_view alias(DialogueState s);
// Accepts canonical names, aliases and the spaced spellings of both ("data visualization",
// "ask selection", "task execution").
std::optional<DialogueState> normalize_state(std::string_view name);

// Each state may stay put or move one step forward; model_training is absorbing.
std::vector<DialogueState> allowed_next(DialogueState s);
bool is_allowed(DialogueState from, DialogueState to);

enum class Intent { get_dataset_info, get_dataset_trend, select_problem, formulate_problem, problem_execution, chitchat };

inline constexpr std::array<Intent, 6> kAllIntents = {Intent::get_dataset_info,  Intent::get_dataset_trend,
                                                      Intent::select_problem,    Intent::formulate_problem,
                                                      Intent::problem_execution, Intent::chitchat};

// "Get dataset info", ..., "Chitchat"
std::string_view display_name(Intent i);
std::string_view to_string(Intent i);  // get_dataset_info, ...
// Case- and separator-insensitive against the six names; anything else is nullopt.
std::optional<Intent> parse_intent(std::string_view text);

}  // namespace dschat::dialogue
