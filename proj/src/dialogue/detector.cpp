#include "dschat/dialogue/detector.hpp"

#include "dschat/gateway/json_extract.hpp"
#include "dschat/util/text.hpp"

namespace dschat::dialogue {

std::optional<Decision> parse_decision(std::string_view reply, DialogueState state, std::string* why) {
  auto fail = [&](std::string reason) -> std::optional<Decision> {
    if (why) *why = std::move(reason);
    return std::nullopt;
  };
  Json j;
  try {
    j = gateway::extract_object(reply);
  } catch (const ValidationError& e) {
    return fail(e.code());
  }
  if (!j.contains("intent") || !j["intent"].is_string()) return fail("MissingIntent");
  const auto intent = parse_intent(j["intent"].get<std::string>());
  if (!intent) return fail("UnknownIntent(" + j["intent"].get<std::string>() + ")");
  if (!j.contains("next_state") || !j["next_state"].is_string()) return fail("MissingNextState");
  const auto next = normalize_state(j["next_state"].get<std::string>());
  if (!next) return fail("UnknownState(" + j["next_state"].get<std::string>() + ")");
  if (!is_allowed(state, *next)) {
    return fail("TransitionNotAllowed(" + std::string(to_string(state)) + "->" + std::string(to_string(*next)) + ")");
  }
  Decision d{*intent, state, *next, std::nullopt, false, 0};
  if (j.contains("current_state") && j["current_state"].is_string()) {
    d.reported_current = normalize_state(j["current_state"].get<std::string>());
  }
  return d;
}

std::string whitelist_reminder(DialogueState state) {
  std::vector<std::string> names;
  for (auto s : allowed_next(state)) names.emplace_back(to_string(s));
  return " Next state should be from the following states - " + util::join(names, ", ");
}

Decision detect_intent_state(const std::string& context, DialogueState state, const std::string& utterance,
                             const gateway::Gateway& gw) {
  if (util::trim(utterance).empty()) throw ValidationError("EmptyUtterance", "utterance is empty");
  const gateway::Bindings bind = {
      {"context", context}, {"conversation state", std::string(to_string(state))}, {"user input", utterance}};
  for (int attempt = 1; attempt <= 2; ++attempt) {
    const auto reply =
        gw.call(gateway::AgentId::state_detector, bind, attempt == 1 ? std::string() : whitelist_reminder(state));
    if (auto d = parse_decision(reply.raw_text, state)) {
      d->attempts = attempt;
      return *d;
    }
  }
  return Decision{Intent::chitchat, state, state, std::nullopt, true, 2};
}

}  // namespace dschat::dialogue
