#pragma once

#include <optional>
#include <string>
#include <vector>

#include "dschat/gateway/gateway.hpp"

namespace dschat::dialogue {

struct Turn {
  std::string role;  // user or assistant
  std::string text;
  bool operator==(const Turn&) const = default;
};

class SummaryEmpty : public ValidationError {
 public:
  SummaryEmpty() : ValidationError("SummaryEmpty", "dialogue summarizer returned an empty summary") {}
};

// Role-labelled turns between "=== DIALOG START ===" and "=== DIALOG END ===" so the model
// summarizes this dialog and not the demonstrations.
std::string fence_history(const std::vector<Turn>& history);

// Empty history returns the utterance without calling the provider.
std::string summarize_dialogue(const std::vector<Turn>& history, const std::string& latest_utterance,
                               const std::optional<std::string>& latest_response, const gateway::Gateway& gw);

}  // namespace dschat::dialogue
