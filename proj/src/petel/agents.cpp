#include "dschat/petel/agents.hpp"

#include "dschat/gateway/json_extract.hpp"
#include "dschat/util/text.hpp"

namespace dschat::petel {

using gateway::AgentId;

namespace {

const char* kSelectorSuffix =
    " Reply with one JSON object {\"model\": \"model name\", \"reason\": \"...\"} where the model is one of "
    "classification, regression, clustering, dimensionality reduction, anomaly detection.";

std::string spaced(std::string_view s) {
  std::string out = util::to_lower(s);
  for (char& c : out) {
    if (c == '_' || c == '-') c = ' ';
  }
  return out;
}

std::string value_text(const Json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number_integer()) return std::to_string(v.get<long long>());
  if (v.is_number()) return util::format_number(v.get<double>());
  if (v.is_array()) {
    std::vector<std::string> parts;
    for (const auto& x : v) parts.push_back(value_text(x));
    return "[" + util::join(parts, ", ") + "]";
  }
  return v.dump();
}

}  // namespace

std::optional<TaskChoice> parse_task_choice(std::string_view reply) {
  Json j;
  try {
    j = gateway::extract_object(reply);
  } catch (const ValidationError&) {
    return std::nullopt;
  }
  for (const char* key : {"model", "task", "problem_type"}) {
    if (!j.contains(key) || !j[key].is_string()) continue;
    auto t = parse_task(j[key].get<std::string>());
    if (!t) return std::nullopt;
    std::string reason = j.contains("reason") && j["reason"].is_string() ? j["reason"].get<std::string>() : "";
    return TaskChoice{*t, reason};
  }
  return std::nullopt;
}

TaskChoice select_task(const std::string& context, const std::string& utterance, const gateway::Gateway& gw) {
  const gateway::Bindings bind = {{"context", context}, {"input", utterance}};
  std::string last;
  for (int attempt = 0; attempt < 2; ++attempt) {
    last = gw.call(AgentId::task_selector, bind, attempt == 0 ? "" : kSelectorSuffix).raw_text;
    if (auto c = parse_task_choice(last)) return *c;
  }
  throw InvalidTask(last.substr(0, 200));
}

std::string fallback_question(const Slot& slot) {
  return "What value should be used for " + slot.name + "? (" + slot.description + ")";
}

std::optional<SeekResult> seek(const Petel& petel, const std::string& context, const std::string& dataset_summary,
                               const gateway::Gateway& gw) {
  auto next = next_unfilled_slot(petel);
  if (!next) return std::nullopt;
  const Slot& slot = *petel.schema().find(*next);
  SeekResult r;
  r.slot = slot.name;
  r.optional_phase = !slot.required;
  const gateway::Bindings bind = {
      {"petel", serialize_petel(petel)}, {"context", context}, {"dataset_summary", dataset_summary}};
  const std::string suffix = " The next unidentified slot is " + slot.name + ".";
  r.question = util::trim(gw.call(AgentId::seeker, bind, suffix).raw_text);
  if (r.question.empty()) {
    r.question = fallback_question(slot);
    r.fallback = true;
  }
  if (r.optional_phase) {
    std::vector<std::string> rest;
    for (const auto& s : petel.schema().slots) {
      if (!s.required && !petel.is_filled(s.name)) rest.push_back(s.name);
    }
    r.question += "\n\nThese remaining details are optional (" + util::join(rest, ", ") +
                  "). Say skip if you would rather go ahead without them.";
  }
  return r;
}

Petel merge_feed_reply(const Petel& before, const Json& reply) {
  if (!reply.is_object()) throw FeedRejected("reply is not an object");
  Petel out = before;
  for (auto it = reply.begin(); it != reply.end(); ++it) {
    const std::string name = canonical_slot_name(before.schema(), it.key());
    if (name.empty()) throw FeedRejected("unknown slot " + it.key());
    if (name == "problem_type") {
      auto t = it.value().is_string() ? parse_task(it.value().get<std::string>()) : std::nullopt;
      if (!t || *t != before.problem_type()) throw FeedRejected("problem_type changed to " + it.value().dump());
      continue;
    }
    try {
      out.set(name, it.value());
    } catch (const TypeMismatch& e) {
      throw FeedRejected(e.what());
    }
    if (before.is_filled(name) && !out.is_filled(name)) throw FeedRejected("slot " + name + " was cleared");
  }
  return out;
}

FeedResult feed(const Petel& petel, const std::string& utterance, const gateway::Gateway& gw) {
  const gateway::Bindings bind = {{"input", utterance}, {"petel", serialize_petel(petel)}};
  std::string suffix;
  std::string why;
  for (int attempt = 0; attempt < 2; ++attempt) {
    const std::string reply = gw.call(AgentId::feeder, bind, suffix).raw_text;
    try {
      Petel merged = merge_feed_reply(petel, gateway::extract_object(reply));
      FeedResult r{merged, {}, false, ""};
      for (const auto& s : petel.schema().slots) {
        if (petel.get(s.name) != merged.get(s.name)) r.updated.push_back(s.name);
      }
      return r;
    } catch (const ValidationError& e) {
      why = e.what();
    }
    suffix = " The previous reply was rejected (" + why +
             "). Return the whole JSON object with problem_type unchanged, keep every filled slot, "
             "and update only the slot related to the information.";
  }
  return FeedResult{petel, {}, true, why};
}

bool description_is_faithful(const Petel& petel, std::string_view text) {
  const std::string t = spaced(text);
  if (t.find(spaced(display_name(petel.problem_type()))) == std::string::npos) return false;
  if (petel.schema().has_target()) {
    auto target = petel.scalar_text("target_variable");
    if (target && t.find(spaced(*target)) == std::string::npos) return false;
  }
  return true;
}

std::string template_description(const Petel& petel) {
  std::string out = "This is a " + display_name(petel.problem_type()) + " problem.";
  for (const auto& s : petel.schema().slots) {
    if (!petel.is_filled(s.name) || petel.is_skipped(s.name)) continue;
    std::string label = s.name;
    label[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(label[0])));
    label = util::replace_all(label, "_", " ");
    std::string value;
    if (s.kind == SlotKind::filter_list) {
      std::vector<std::string> parts;
      for (const auto& f : petel.filters()) {
        parts.push_back(f.column + " " + std::string(to_string(f.condition)) + " " + value_text(f.value));
      }
      value = util::join(parts, "; ");
    } else if (s.kind == SlotKind::list) {
      value = util::join(petel.list_text(s.name), ", ");
    } else {
      value = petel.scalar_text(s.name).value_or("");
    }
    out += " " + label + ": " + value + ".";
  }
  return out;
}

DescribeResult describe(const Petel& petel, const gateway::Gateway& gw) {
  const std::string reply = util::trim(gw.call(AgentId::descriptor, {{"petel", serialize_petel(petel)}}).raw_text);
  if (!reply.empty() && description_is_faithful(petel, reply)) return {reply, false};
  return {template_description(petel), true};
}

}  // namespace dschat::petel
