#pragma once

#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "dschat/errors.hpp"
#include "dschat/gateway/agent.hpp"

namespace dschat::gateway {

enum class Role { user, assistant };

struct Demonstration {
  Role role;
  std::string text;
  bool operator==(const Demonstration&) const = default;
};

struct PromptTemplate {
  AgentId agent;
  std::string system_setup;
  std::vector<Demonstration> demonstrations;
  std::string directive_template;
  int teler_level = 0;
  // Placeholder names this template may use; defaults to the agent's declared fields.
  std::vector<std::string> placeholders;
};

struct PromptBundle {
  AgentId agent;
  int teler_level = 0;
  std::string resolved_system_setup;
  std::string resolved_directive;
  std::vector<Demonstration> demonstrations;
  std::string fingerprint;
  // UnknownBinding notices; never fatal.
  std::vector<std::string> warnings;
};

using Bindings = std::map<std::string, std::string>;

class MissingBinding : public ValidationError {
 public:
  explicit MissingBinding(std::string name)
      : ValidationError("MissingBinding", "no binding for placeholder {" + name + "}"), name_(std::move(name)) {}
  const std::string& name() const noexcept { return name_; }

 private:
  std::string name_;
};

class UnsupportedLevel : public ValidationError {
 public:
  UnsupportedLevel(AgentId agent, int level)
      : ValidationError("UnsupportedLevel", "agent " + std::string(to_string(agent)) +
                                                " has no directive at level " + std::to_string(level)),
        agent_(agent),
        level_(level) {}
  AgentId agent() const noexcept { return agent_; }
  int level() const noexcept { return level_; }

 private:
  AgentId agent_;
  int level_;
};

class InvalidTemplate : public ValidationError {
 public:
  explicit InvalidTemplate(const std::string& what) : ValidationError("InvalidTemplate", what) {}
};

// Placeholder names in order of first appearance. A placeholder is {name} where name
// starts with a lowercase letter and holds lowercase letters, '_' or spaces.
std::vector<std::string> placeholders_in(std::string_view text);

// Throws InvalidTemplate when a level is out of range or a placeholder is undeclared.
void validate_template(const PromptTemplate& tmpl);

// Substitutes bindings into the system setup and directive. Declared fields that are
// bound but referenced by neither text are appended to the directive as a data block.
// Demonstrations are copied verbatim.
PromptBundle assemble_prompt(const PromptTemplate& tmpl, const Bindings& bindings);

// FNV-1a 64 over agent, system and directive, rendered as 16 hex digits.
std::string fingerprint(AgentId agent, std::string_view system_setup, std::string_view directive);

}  // namespace dschat::gateway
