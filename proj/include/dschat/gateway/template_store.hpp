#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "dschat/gateway/prompt.hpp"

namespace dschat::gateway {

namespace detail {
// Generated at build time from assets/prompts; paths are "<agent>/<file>.txt".
const std::vector<std::pair<std::string_view, std::string_view>>& embedded_prompt_files();
}  // namespace detail

// Prompt assets per agent: system setup, demonstrations and one directive per level.
// Level 0 (no directive) is always available.
class TemplateStore {
 public:
  static const TemplateStore& embedded();
  static TemplateStore from_directory(const std::filesystem::path& root);
  // (relative path, content) pairs; one trailing newline is stripped from each file.
  static TemplateStore from_files(const std::vector<std::pair<std::string, std::string>>& files);

  PromptTemplate get(AgentId agent, int level) const;
  bool has_level(AgentId agent, int level) const;
  // Ascending, always starting with 0.
  std::vector<int> levels(AgentId agent) const;
  // The raw directive file text for a level ("" for level 0).
  std::string directive_text(AgentId agent, int level) const;

 private:
  struct AgentAssets {
    std::string system;
    std::vector<Demonstration> demos;
    std::map<int, std::string> directives;
  };
  std::map<AgentId, AgentAssets> agents_;
};

// The directive an agent sends at `level` with the payload substituted; at level 0
// this is the data block alone.
std::string render_directive(const TemplateStore& store, AgentId agent, int level, const Bindings& payload);
std::string render_directive(AgentId agent, int level, const Bindings& payload);

}  // namespace dschat::gateway
