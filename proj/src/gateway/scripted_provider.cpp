#include "dschat/gateway/scripted_provider.hpp"

#include <fstream>
#include <istream>

#include "dschat/json.hpp"

namespace dschat::gateway {

bool ScriptEntry::matches(const PromptBundle& bundle) const {
  if (agent && *agent != bundle.agent) return false;
  if (!fingerprint.empty() && fingerprint != bundle.fingerprint) return false;
  if (!contains.empty() && bundle.resolved_directive.find(contains) == std::string::npos) return false;
  return true;
}

std::string ScriptEntry::describe() const {
  std::string s = agent ? std::string(to_string(*agent)) : "any";
  if (!contains.empty()) s += " containing \"" + contains + "\"";
  if (!fingerprint.empty()) s += " with fingerprint " + fingerprint;
  return s;
}

ScriptedProvider::ScriptedProvider(std::vector<ScriptEntry> entries, bool strict_order)
    : entries_(std::move(entries)), used_(entries_.size(), false), strict_(strict_order) {}

std::vector<ScriptEntry> ScriptedProvider::parse_jsonl(std::istream& in) {
  std::vector<ScriptEntry> entries;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    Json rec = Json::parse(line, nullptr, false);
    if (rec.is_discarded() || !rec.is_object() || !rec.contains("reply") || !rec["reply"].is_string()) {
      throw ValidationError("BadTranscript", "transcript line " + std::to_string(lineno) + " is not a script record");
    }
    ScriptEntry e;
    e.reply = rec["reply"].get<std::string>();
    if (rec.contains("match")) {
      const Json& m = rec["match"];
      if (!m.is_object()) throw ValidationError("BadTranscript", "line " + std::to_string(lineno) + ": match must be an object");
      const std::string agent = m.value("agent", "any");
      if (agent != "any" && agent != "*") {
        e.agent = parse_agent(agent);
        if (!e.agent) throw ValidationError("BadTranscript", "line " + std::to_string(lineno) + ": unknown agent " + agent);
      }
      e.contains = m.value("contains", "");
      e.fingerprint = m.value("fingerprint", "");
    }
    entries.push_back(std::move(e));
  }
  return entries;
}

std::shared_ptr<ScriptedProvider> ScriptedProvider::from_file(const std::filesystem::path& path, bool strict_order) {
  std::ifstream in(path);
  if (!in) throw NotFoundError("TranscriptMissing", "cannot open transcript " + path.string());
  return std::make_shared<ScriptedProvider>(parse_jsonl(in), strict_order);
}

ProviderResponse ScriptedProvider::complete(const PromptBundle& bundle, std::chrono::milliseconds) {
  std::lock_guard<std::mutex> lock(mu_);
  const std::string got = std::string(to_string(bundle.agent));
  if (strict_) {
    while (next_ < entries_.size() && used_[next_]) ++next_;
    if (next_ >= entries_.size()) throw ScriptExhausted("script exhausted at call for " + got);
    const ScriptEntry& e = entries_[next_];
    if (!e.matches(bundle)) throw ScriptMismatch(e.describe(), got);
    used_[next_] = true;
    ++next_;
    return {e.reply, std::chrono::milliseconds(0), id()};
  }
  bool any_left = false;
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    if (used_[i]) continue;
    any_left = true;
    if (entries_[i].matches(bundle)) {
      used_[i] = true;
      return {entries_[i].reply, std::chrono::milliseconds(0), id()};
    }
  }
  if (!any_left) throw ScriptExhausted("script exhausted at call for " + got);
  throw ScriptMismatch("an entry matching the call", got);
}

std::size_t ScriptedProvider::consumed() const {
  std::lock_guard<std::mutex> lock(mu_);
  std::size_t n = 0;
  for (bool u : used_) n += u ? 1 : 0;
  return n;
}

std::size_t ScriptedProvider::remaining() const { return entries_.size() - consumed(); }

}  // namespace dschat::gateway
