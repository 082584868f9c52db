#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <random>
#include <shared_mutex>
#include <string>
#include <vector>

#include "dschat/dialogue/engine.hpp"
#include "dschat/dialogue/event_log.hpp"
#include "dschat/petel/petel.hpp"

namespace dschat::dialogue {

class SessionNotFound : public NotFoundError {
 public:
  explicit SessionNotFound(const std::string& id) : NotFoundError("SessionNotFound", "unknown session " + id) {}
};

class NoResults : public ConflictError {
 public:
  NoResults() : ConflictError("NoResults", "no results yet; the session has not reached model_training") {}
};

struct ManagerOptions {
  std::filesystem::path data_dir;  // empty keeps everything in memory
  std::uint64_t seed = 0;          // session ids
};

struct UploadReply {
  dataset::DatasetSummary summary;
  dataset::TaskSuggestion suggestions;
  std::string reply;
  Json to_json() const;
};

struct MessageReply {
  std::string reply;
  DialogueState state = DialogueState::data_visualization;
  petel::Progress progress;
  bool failed = false;  // the turn was rejected and nothing changed
  Json to_json() const;
};

// session_id, created_at, state, dataset, petel, last_summary, turn_count, petel_progress
Json session_record(const Session& s);
petel::Progress session_progress(const Session& s);

// Owns live sessions. One turn at a time per session; sessions never wait on each other.
class SessionManager {
 public:
  explicit SessionManager(Engine engine, ManagerOptions options = {});

  std::string create();
  UploadReply upload(const std::string& id, std::string_view csv, const std::string& name = "dataset");
  MessageReply post_message(const std::string& id, const std::string& text);
  Session get(const std::string& id) const;
  results::ResultSummary results(const std::string& id) const;
  std::vector<std::string> ids() const;

  // Loads a session from its event log so it can continue; returns its id.
  std::string restore(const std::filesystem::path& log_file);
  // Restores every *.jsonl under data_dir; logs with violations are skipped.
  std::size_t restore_all();

  std::filesystem::path log_path(const std::string& id) const;
  const Engine& engine() const { return engine_; }

 private:
  struct Entry {
    std::mutex mu;
    Session session;
    std::unique_ptr<EventLog> log;
  };

  std::shared_ptr<Entry> find(const std::string& id) const;
  std::string new_id();
  void write(Entry& e, std::vector<Json> records);

  Engine engine_;
  ManagerOptions options_;
  mutable std::shared_mutex map_mu_;
  std::map<std::string, std::shared_ptr<Entry>> sessions_;
  std::mutex id_mu_;
  std::mt19937_64 rng_;
};

}  // namespace dschat::dialogue
