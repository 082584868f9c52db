#pragma once

#include <optional>
#include <string>

#include "dschat/dialogue/state.hpp"
#include "dschat/gateway/gateway.hpp"

namespace dschat::dialogue {

struct Decision {
  Intent intent = Intent::chitchat;
  DialogueState current = DialogueState::data_visualization;
  DialogueState next = DialogueState::data_visualization;
  std::optional<DialogueState> reported_current;  // the reply's current_state, normalized, if it gave one
  bool fallback = false;  // both attempts failed validation
  int attempts = 0;
  bool operator==(const Decision& o) const {
    return intent == o.intent && current == o.current && next == o.next;
  }
};

// Validates one detector reply against the current state. `why` gets the reason on failure.
std::optional<Decision> parse_decision(std::string_view reply, DialogueState state, std::string* why = nullptr);

// " Next state should be from the following states - a, b"
std::string whitelist_reminder(DialogueState state);

// One retry with the whitelist reminder, then {chitchat, state, state}. Transport errors propagate.
Decision detect_intent_state(const std::string& context, DialogueState state, const std::string& utterance,
                             const gateway::Gateway& gw);

}  // namespace dschat::dialogue
