#include "dschat/gateway/prompt.hpp"

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <set>

namespace dschat::gateway {

namespace {

bool name_start(char c) { return c >= 'a' && c <= 'z'; }
bool name_char(char c) { return name_start(c) || c == '_' || c == ' '; }

// Calls on_text for literal spans and on_name for each placeholder.
template <typename Text, typename Name>
void scan(std::string_view text, Text&& on_text, Name&& on_name) {
  std::size_t i = 0;
  std::size_t literal = 0;
  while (i < text.size()) {
    if (text[i] == '{' && i + 1 < text.size() && name_start(text[i + 1])) {
      std::size_t j = i + 1;
      while (j < text.size() && name_char(text[j])) ++j;
      if (j < text.size() && text[j] == '}' && text[j - 1] != ' ') {
        on_text(text.substr(literal, i - literal));
        on_name(std::string(text.substr(i + 1, j - i - 1)));
        i = j + 1;
        literal = i;
        continue;
      }
    }
    ++i;
  }
  on_text(text.substr(literal));
}

std::string substitute(std::string_view text, const Bindings& bindings) {
  std::string out;
  out.reserve(text.size());
  scan(
      text, [&](std::string_view lit) { out.append(lit); },
      [&](const std::string& name) {
        auto it = bindings.find(name);
        if (it == bindings.end()) throw MissingBinding(name);
        out.append(it->second);
      });
  return out;
}

}  // namespace

std::vector<std::string> placeholders_in(std::string_view text) {
  std::vector<std::string> names;
  scan(
      text, [](std::string_view) {},
      [&](const std::string& name) {
        if (std::find(names.begin(), names.end(), name) == names.end()) names.push_back(name);
      });
  return names;
}

void validate_template(const PromptTemplate& tmpl) {
  if (tmpl.teler_level < 0 || tmpl.teler_level > 5) {
    throw InvalidTemplate("teler level " + std::to_string(tmpl.teler_level) + " outside 0..5");
  }
  const auto& declared = tmpl.placeholders.empty() ? declared_fields(tmpl.agent) : tmpl.placeholders;
  for (const auto* text : {&tmpl.system_setup, &tmpl.directive_template}) {
    for (const auto& name : placeholders_in(*text)) {
      if (std::find(declared.begin(), declared.end(), name) == declared.end()) {
        throw InvalidTemplate("placeholder {" + name + "} is not declared for " +
                              std::string(to_string(tmpl.agent)));
      }
    }
  }
}

PromptBundle assemble_prompt(const PromptTemplate& tmpl, const Bindings& bindings) {
  validate_template(tmpl);
  const auto& declared = tmpl.placeholders.empty() ? declared_fields(tmpl.agent) : tmpl.placeholders;

  PromptBundle bundle;
  bundle.agent = tmpl.agent;
  bundle.teler_level = tmpl.teler_level;
  bundle.demonstrations = tmpl.demonstrations;
  bundle.resolved_system_setup = substitute(tmpl.system_setup, bindings);
  bundle.resolved_directive = substitute(tmpl.directive_template, bindings);

  std::set<std::string> used;
  for (const auto& n : placeholders_in(tmpl.system_setup)) used.insert(n);
  for (const auto& n : placeholders_in(tmpl.directive_template)) used.insert(n);

  std::string block;
  for (const auto& field : declared) {
    if (used.count(field)) continue;
    auto it = bindings.find(field);
    if (it == bindings.end()) continue;
    if (!block.empty()) block += '\n';
    block += field + ": " + it->second;
  }
  if (!block.empty()) {
    if (!bundle.resolved_directive.empty()) bundle.resolved_directive += "\n\n";
    bundle.resolved_directive += block;
  }

  for (const auto& [name, value] : bindings) {
    if (std::find(declared.begin(), declared.end(), name) == declared.end()) {
      bundle.warnings.push_back("UnknownBinding(" + name + ")");
    }
  }
  bundle.fingerprint = fingerprint(tmpl.agent, bundle.resolved_system_setup, bundle.resolved_directive);
  return bundle;
}

std::string fingerprint(AgentId agent, std::string_view system_setup, std::string_view directive) {
  std::uint64_t h = 14695981039346656037ull;
  auto mix = [&](std::string_view s) {
    for (unsigned char c : s) {
      h ^= c;
      h *= 1099511628211ull;
    }
  };
  mix(to_string(agent));
  mix(std::string_view("\x1f", 1));
  mix(system_setup);
  mix(std::string_view("\x1f", 1));
  mix(directive);
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace dschat::gateway
