#pragma once

#include <filesystem>
#include <iosfwd>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "dschat/gateway/provider.hpp"

namespace dschat::gateway {

class ScriptExhausted : public TransportError {
 public:
  explicit ScriptExhausted(const std::string& what) : TransportError("ScriptExhausted", what, false) {}
};

class ScriptMismatch : public TransportError {
 public:
  ScriptMismatch(std::string expected, std::string got)
      : TransportError("ScriptMismatch", "script expected " + expected + ", got " + got, false),
        expected_(std::move(expected)),
        got_(std::move(got)) {}
  const std::string& expected() const noexcept { return expected_; }
  const std::string& got() const noexcept { return got_; }

 private:
  std::string expected_;
  std::string got_;
};

struct ScriptEntry {
  std::optional<AgentId> agent;  // nullopt matches any agent
  std::string contains;          // substring of the resolved directive; "" matches all
  std::string fingerprint;       // exact bundle fingerprint; "" matches all
  std::string reply;

  bool matches(const PromptBundle& bundle) const;
  std::string describe() const;
};

// Replays canned replies. In strict-order mode each call must match the next entry;
// otherwise the first unconsumed matching entry is used.
class ScriptedProvider : public Provider {
 public:
  ScriptedProvider(std::vector<ScriptEntry> entries, bool strict_order);

  // One record per line: {"match": {"agent": "...", "contains": "..."}, "reply": "..."}.
  // "agent" may be "any" or "*". Blank lines are skipped.
  static std::vector<ScriptEntry> parse_jsonl(std::istream& in);
  static std::shared_ptr<ScriptedProvider> from_file(const std::filesystem::path& path, bool strict_order);

  ProviderResponse complete(const PromptBundle& bundle, std::chrono::milliseconds timeout) override;
  std::string id() const override { return "scripted"; }

  std::size_t consumed() const;
  std::size_t remaining() const;
  bool exhausted() const { return remaining() == 0; }

 private:
  mutable std::mutex mu_;
  std::vector<ScriptEntry> entries_;
  std::vector<bool> used_;
  std::size_t next_ = 0;
  bool strict_;
};

}  // namespace dschat::gateway
