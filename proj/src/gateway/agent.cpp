#include "dschat/gateway/agent.hpp"

#include <map>

namespace dschat::gateway {

std::string_view to_string(AgentId agent) {
  switch (agent) {
    case AgentId::state_detector: return "state_detector";
    case AgentId::dialogue_summarizer: return "dialogue_summarizer";
    case AgentId::conversation_manager: return "conversation_manager";
    case AgentId::dataset_summarizer: return "dataset_summarizer";
    case AgentId::task_suggestor: return "task_suggestor";
    case AgentId::task_selector: return "task_selector";
    case AgentId::seeker: return "seeker";
    case AgentId::feeder: return "feeder";
    case AgentId::descriptor: return "descriptor";
  }
  return "unknown";
}

std::optional<AgentId> parse_agent(std::string_view name) {
  for (AgentId a : kAllAgents) {
    if (to_string(a) == name) return a;
  }
  return std::nullopt;
}

const std::vector<std::string>& declared_fields(AgentId agent) {
  static const std::map<AgentId, std::vector<std::string>> fields = {
      {AgentId::state_detector, {"context", "conversation state", "user input"}},
      {AgentId::dialogue_summarizer, {"history"}},
      {AgentId::conversation_manager, {"context", "state", "input", "intent", "microprocess", "mp_resp"}},
      {AgentId::dataset_summarizer, {"dataset"}},
      {AgentId::task_suggestor, {"summary"}},
      {AgentId::task_selector, {"context", "input"}},
      {AgentId::seeker, {"petel", "context", "dataset_summary"}},
      {AgentId::feeder, {"input", "petel"}},
      {AgentId::descriptor, {"petel"}},
  };
  return fields.at(agent);
}

int default_level(AgentId agent) {
  switch (agent) {
    case AgentId::state_detector:
    case AgentId::dialogue_summarizer:
    case AgentId::dataset_summarizer:
    case AgentId::task_selector:
    case AgentId::seeker:
    case AgentId::feeder:
      return 2;
    case AgentId::conversation_manager:
    case AgentId::task_suggestor:
    case AgentId::descriptor:
      return 1;
  }
  return 1;
}

bool is_teler_agent(AgentId agent) {
  return agent == AgentId::state_detector || agent == AgentId::dialogue_summarizer ||
         agent == AgentId::conversation_manager;
}

bool is_strict_format(AgentId agent) {
  return agent == AgentId::state_detector || agent == AgentId::dialogue_summarizer;
}

}  // namespace dschat::gateway
