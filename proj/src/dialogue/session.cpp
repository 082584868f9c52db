#include "dschat/dialogue/session.hpp"

namespace dschat::dialogue {

Json Session::snapshot() const {
  Json j;
  j["session_id"] = id;
  j["created_at"] = created_at;
  j["state"] = to_string(state);
  j["context"] = context;
  j["turn_count"] = turn_count;
  Json h = Json::array();
  for (const auto& t : history) h.push_back({{"role", t.role}, {"text", t.text}});
  j["history"] = std::move(h);
  j["dataset"] = dataset ? Json(dataset->name) : Json();
  j["summary"] = summary ? summary->to_json() : Json();
  j["suggestions"] = suggestions ? suggestions->to_json() : Json();
  j["selected_task"] = selected_task ? Json(std::string(petel::to_string(*selected_task))) : Json();
  j["petel"] = petel ? Json::parse(petel->to_json().dump()) : Json();
  j["awaiting_confirmation"] = awaiting_confirmation;
  j["results"] = results ? results->to_json() : Json();
  return j;
}

Session Session::from_snapshot(const Json& j, std::shared_ptr<const dataset::Dataset> data) {
  Session s;
  try {
    s.id = j.at("session_id").get<std::string>();
    s.created_at = j.value("created_at", "");
    const auto st = normalize_state(j.at("state").get<std::string>());
    if (!st) throw ValidationError("BadSnapshot", "unknown state " + j.at("state").dump());
    s.state = *st;
    s.context = j.value("context", "");
    s.turn_count = j.value("turn_count", 0);
    for (const auto& t : j.value("history", Json::array())) {
      s.history.push_back({t.at("role").get<std::string>(), t.at("text").get<std::string>()});
    }
    s.dataset = std::move(data);
    if (j.contains("summary") && !j["summary"].is_null()) s.summary = dataset::DatasetSummary::from_json(j["summary"]);
    if (j.contains("suggestions") && !j["suggestions"].is_null()) {
      s.suggestions = dataset::TaskSuggestion::from_json(j["suggestions"]);
    }
    if (j.contains("selected_task") && !j["selected_task"].is_null()) {
      s.selected_task = petel::parse_task(j["selected_task"].get<std::string>());
    }
    if (j.contains("petel") && !j["petel"].is_null()) s.petel = petel::petel_from_json(j["petel"]);
    s.awaiting_confirmation = j.value("awaiting_confirmation", false);
    if (j.contains("results") && !j["results"].is_null()) s.results = results::ResultSummary::from_json(j["results"]);
  } catch (const Json::exception& e) {
    throw ValidationError("BadSnapshot", std::string("malformed session snapshot: ") + e.what());
  }
  return s;
}

}  // namespace dschat::dialogue
