#include "dschat/gateway/template_store.hpp"

#include <fstream>
#include <regex>
#include <sstream>

namespace dschat::gateway {

namespace {

std::string strip_one_newline(std::string s) {
  if (!s.empty() && s.back() == '\n') s.pop_back();
  return s;
}

}  // namespace

const TemplateStore& TemplateStore::embedded() {
  static const TemplateStore store = [] {
    std::vector<std::pair<std::string, std::string>> files;
    for (const auto& [path, content] : detail::embedded_prompt_files()) {
      files.emplace_back(std::string(path), std::string(content));
    }
    return from_files(files);
  }();
  return store;
}

TemplateStore TemplateStore::from_directory(const std::filesystem::path& root) {
  namespace fs = std::filesystem;
  if (!fs::is_directory(root)) throw NotFoundError("TemplateDirMissing", "no template directory " + root.string());
  std::vector<std::pair<std::string, std::string>> files;
  for (const auto& entry : fs::recursive_directory_iterator(root)) {
    if (!entry.is_regular_file() || entry.path().extension() != ".txt") continue;
    std::ifstream in(entry.path(), std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    files.emplace_back(fs::relative(entry.path(), root).generic_string(), buf.str());
  }
  return from_files(files);
}

TemplateStore TemplateStore::from_files(const std::vector<std::pair<std::string, std::string>>& files) {
  static const std::regex demo_re(R"(demo_(\d+)_(user|assistant)\.txt)");
  static const std::regex level_re(R"(directive_level(\d)\.txt)");

  TemplateStore store;
  std::map<AgentId, std::map<std::pair<int, int>, std::string>> demos;
  for (const auto& [path, raw] : files) {
    const auto slash = path.find('/');
    if (slash == std::string::npos) continue;
    const auto agent = parse_agent(path.substr(0, slash));
    if (!agent) throw InvalidTemplate("asset for unknown agent: " + path);
    const std::string file = path.substr(slash + 1);
    std::string content = strip_one_newline(raw);
    auto& assets = store.agents_[*agent];
    std::smatch m;
    if (file == "system.txt") {
      assets.system = std::move(content);
    } else if (std::regex_match(file, m, demo_re)) {
      demos[*agent][{std::stoi(m[1]), m[2] == "user" ? 0 : 1}] = std::move(content);
    } else if (std::regex_match(file, m, level_re)) {
      const int level = std::stoi(m[1]);
      if (level < 1 || level > 5) throw InvalidTemplate("directive level out of range: " + path);
      assets.directives[level] = std::move(content);
    } else {
      throw InvalidTemplate("unrecognized asset: " + path);
    }
  }
  for (auto& [agent, entries] : demos) {
    for (auto& [key, text] : entries) {
      store.agents_[agent].demos.push_back({key.second == 0 ? Role::user : Role::assistant, std::move(text)});
    }
  }
  // Every shipped template must satisfy the declared-placeholder rule.
  for (const auto& [agent, assets] : store.agents_) {
    for (int level : store.levels(agent)) validate_template(store.get(agent, level));
  }
  return store;
}

PromptTemplate TemplateStore::get(AgentId agent, int level) const {
  if (!has_level(agent, level)) throw UnsupportedLevel(agent, level);
  PromptTemplate t;
  t.agent = agent;
  t.teler_level = level;
  auto it = agents_.find(agent);
  if (it != agents_.end()) {
    t.system_setup = it->second.system;
    t.demonstrations = it->second.demos;
    if (level > 0) t.directive_template = it->second.directives.at(level);
  }
  return t;
}

bool TemplateStore::has_level(AgentId agent, int level) const {
  if (level == 0) return true;
  auto it = agents_.find(agent);
  return it != agents_.end() && it->second.directives.count(level) > 0;
}

std::vector<int> TemplateStore::levels(AgentId agent) const {
  std::vector<int> out{0};
  auto it = agents_.find(agent);
  if (it != agents_.end()) {
    for (const auto& [level, text] : it->second.directives) out.push_back(level);
  }
  return out;
}

std::string TemplateStore::directive_text(AgentId agent, int level) const {
  return get(agent, level).directive_template;
}

std::string render_directive(const TemplateStore& store, AgentId agent, int level, const Bindings& payload) {
  return assemble_prompt(store.get(agent, level), payload).resolved_directive;
}

std::string render_directive(AgentId agent, int level, const Bindings& payload) {
  return render_directive(TemplateStore::embedded(), agent, level, payload);
}

}  // namespace dschat::gateway
