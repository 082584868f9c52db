#pragma once

#include <cstdint>
#include <filesystem>
#include <mutex>
#include <string>
#include <vector>

#include "dschat/dialogue/session.hpp"
#include "dschat/json.hpp"

namespace dschat::dialogue {

// Record kinds. Every record carries ts, seq, session_id, kind and turn.
//   session      created_at
//   dataset      name, rows, columns, file, reply, snapshot (commits the upload)
//   utterance    role, text; the assistant record carries snapshot and commits the turn
//   agent_call   agent, level, fingerprint, directive, reply, provider, attempts, latency_ms, error
//   state_change from, to, intent
//   error        code, category, message (closes a failed turn; nothing before it is applied)
std::string iso_timestamp();

class EventLog {
 public:
  EventLog(std::filesystem::path file, std::string session_id);

  // Stamps ts, seq and session_id and writes the batch with one append and flush.
  void append(std::vector<Json> records);
  const std::filesystem::path& file() const { return file_; }

 private:
  std::filesystem::path file_;
  std::string session_id_;
  std::int64_t next_seq_ = 0;
  std::mutex mu_;
};

struct LogContents {
  std::vector<Json> records;
  bool truncated = false;  // the last line did not parse (interrupted write)
  std::vector<std::string> errors;  // unparseable lines before the last
};

LogContents read_log(const std::filesystem::path& file);

struct ReplayResult {
  Session session;
  std::vector<DialogueState> trajectory;  // distinct consecutive states, starting at data_visualization
  std::vector<std::string> violations;
  int committed_turns = 0;
  int failed_turns = 0;
  bool truncated = false;
  bool ok() const { return violations.empty(); }
};

// Applies committed records only: a turn counts once its assistant utterance is present.
// Checks seq order, that every state change is allowed and starts from the current state,
// that snapshots agree with the state changes, and that a PeTEL only exists from task_formulation on.
ReplayResult replay_records(const std::vector<Json>& records, const std::filesystem::path& data_dir = {});
// Reads the log and loads the dataset side file next to it when present.
ReplayResult replay_log(const std::filesystem::path& file);

std::string trajectory_text(const std::vector<DialogueState>& trajectory);  // "a → b → c"

}  // namespace dschat::dialogue
