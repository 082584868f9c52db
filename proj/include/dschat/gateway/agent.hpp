#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace dschat::gateway {

enum class AgentId {
  state_detector,
  dialogue_summarizer,
  conversation_manager,
  dataset_summarizer,
  task_suggestor,
  task_selector,
  seeker,
  feeder,
  descriptor,
};

inline constexpr std::array<AgentId, 9> kAllAgents = {
    AgentId::state_detector, AgentId::dialogue_summarizer, AgentId::conversation_manager,
    AgentId::dataset_summarizer, AgentId::task_suggestor, AgentId::task_selector,
    AgentId::seeker, AgentId::feeder, AgentId::descriptor,
};

std::string_view to_string(AgentId agent);
std::optional<AgentId> parse_agent(std::string_view name);

// Data fields an agent's templates may reference, in data-block order.
const std::vector<std::string>& declared_fields(AgentId agent);

// Directive level used when nothing overrides it.
int default_level(AgentId agent);

// The three global agents evaluated across the directive ladder.
bool is_teler_agent(AgentId agent);

// Agents whose reply must be strict JSON; levels above 3 do not apply to them.
bool is_strict_format(AgentId agent);

}  // namespace dschat::gateway
