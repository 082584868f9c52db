#pragma once

#include <optional>
#include <string>
#include <vector>

#include "dschat/gateway/gateway.hpp"
#include "dschat/petel/petel.hpp"

namespace dschat::petel {

class InvalidTask : public ValidationError {
 public:
  explicit InvalidTask(const std::string& got)
      : ValidationError("InvalidTask", "task selector did not name a supported task: " + got) {}
};

class FeedRejected : public ValidationError {
 public:
  explicit FeedRejected(const std::string& why) : ValidationError("FeedRejected", why) {}
};

struct TaskChoice {
  MlTask task;
  std::string reason;
};

// Parses {"model": ..., "reason": ...}; nullopt when the reply names no supported task.
std::optional<TaskChoice> parse_task_choice(std::string_view reply);
// One retry with a format reminder, then InvalidTask.
TaskChoice select_task(const std::string& context, const std::string& utterance, const gateway::Gateway& gw);

struct SeekResult {
  std::string slot;
  std::string question;
  bool optional_phase = false;
  bool fallback = false;  // the reply was empty and the fixed question was used
};

std::string fallback_question(const Slot& slot);
// nullopt when every slot is filled or skipped.
std::optional<SeekResult> seek(const Petel& petel, const std::string& context, const std::string& dataset_summary,
                               const gateway::Gateway& gw);

// Checks a Feeder reply against the current PeTEL and returns the merged result.
// Slots absent from the reply keep their value. Throws FeedRejected when the reply
// changes problem_type, names an unknown slot, has an ill-typed value, or clears a filled slot.
Petel merge_feed_reply(const Petel& before, const Json& reply);

struct FeedResult {
  Petel petel;
  std::vector<std::string> updated;  // slots whose value changed
  bool rejected = false;             // both attempts failed; petel is the input
  std::string rejection;
};

FeedResult feed(const Petel& petel, const std::string& utterance, const gateway::Gateway& gw);

// True when `text` names the target variable and the problem type.
bool description_is_faithful(const Petel& petel, std::string_view text);
// Deterministic sentence-per-slot description.
std::string template_description(const Petel& petel);

struct DescribeResult {
  std::string text;
  bool fallback = false;
};

DescribeResult describe(const Petel& petel, const gateway::Gateway& gw);

}  // namespace dschat::petel
