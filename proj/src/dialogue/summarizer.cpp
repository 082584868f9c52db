#include "dschat/dialogue/summarizer.hpp"

#include "dschat/util/text.hpp"

namespace dschat::dialogue {

std::string fence_history(const std::vector<Turn>& history) {
  std::string out = "=== DIALOG START ===\n";
  for (const auto& t : history) out += (t.role == "user" ? "User: " : "Assistant: ") + t.text + "\n";
  out += "=== DIALOG END ===";
  return out;
}

std::string summarize_dialogue(const std::vector<Turn>& history, const std::string& latest_utterance,
                               const std::optional<std::string>& latest_response, const gateway::Gateway& gw) {
  if (history.empty()) return latest_utterance;
  std::vector<Turn> all = history;
  all.push_back({"user", latest_utterance});
  if (latest_response) all.push_back({"assistant", *latest_response});
  const std::string s =
      util::trim(gw.call(gateway::AgentId::dialogue_summarizer, {{"history", fence_history(all)}}).raw_text);
  if (s.empty()) throw SummaryEmpty();
  return s;
}

}  // namespace dschat::dialogue
