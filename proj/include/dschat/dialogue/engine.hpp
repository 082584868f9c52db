#pragma once

#include <chrono>
#include <cstdint>
#include <exception>
#include <memory>
#include <string>
#include <vector>

#include "dschat/dataset/miniature.hpp"
#include "dschat/dialogue/detector.hpp"
#include "dschat/dialogue/session.hpp"
#include "dschat/engineering/training.hpp"
#include "dschat/gateway/gateway.hpp"
#include "dschat/results/results.hpp"

namespace dschat::dialogue {

class DatasetMissing : public ConflictError {
 public:
  DatasetMissing() : ConflictError("DatasetMissing", "upload a dataset before working on a task") {}
};

struct EngineOptions {
  std::shared_ptr<engineering::Backend> backend;  // null means the builtin baseline
  std::chrono::milliseconds train_timeout{std::chrono::minutes(10)};
  std::uint64_t seed = 0;  // miniature sample and training subsample
  std::size_t budget = dataset::kDefaultBudget;
  results::RenderMode render_mode = results::RenderMode::template_only;
};

// Records are unstamped; the event log adds ts, seq and session_id.
struct UploadOutcome {
  Session session;
  std::string reply;
  std::vector<Json> records;
};

struct TurnOutcome {
  Session session;  // equal to the input when the turn failed
  std::string reply;
  Decision decision;
  std::string microprocess;
  bool failed = false;
  std::string error_code;
  std::exception_ptr error;  // set for conflict and upstream failures, which the caller rethrows
  std::vector<Json> records;
};

// "yes", "go ahead", "sounds good", ... without a negation.
bool is_affirmative(std::string_view utterance);
// "skip", "no", "that's all", ...
bool is_decline(std::string_view utterance);

std::string welcome_message(const dataset::DatasetSummary& summary, const dataset::TaskSuggestion& suggestions);
std::string confirmation_question();
Json call_record_json(const gateway::CallRecord& call, int turn);

// Stateless over sessions: every operation takes a session and returns the next one.
class Engine {
 public:
  explicit Engine(gateway::Gateway gateway, EngineOptions options = {});

  // Only in data_visualization; a second upload there replaces the first.
  UploadOutcome upload(const Session& session, dataset::Dataset data) const;

  // One user turn. Validation failures inside the pipeline become an apology reply with the
  // session unchanged; conflict and upstream failures are returned in `error`. An empty
  // utterance throws ValidationError before anything runs.
  TurnOutcome turn(const Session& session, const std::string& utterance) const;

  const gateway::Gateway& gateway() const { return gateway_; }
  const EngineOptions& options() const { return options_; }
  engineering::Backend& backend() const { return *options_.backend; }

 private:
  gateway::Gateway gateway_;
  EngineOptions options_;
};

}  // namespace dschat::dialogue
