#include "dschat/dialogue/event_log.hpp"

#include <chrono>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <sstream>

#include "dschat/dataset/table.hpp"
#include "dschat/util/text.hpp"

namespace dschat::dialogue {

std::string iso_timestamp() {
  const auto now = std::chrono::system_clock::now();
  const auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(now.time_since_epoch()).count() % 1000;
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[64];
  std::snprintf(buf, sizeof buf, "%04d-%02d-%02dT%02d:%02d:%02d.%03dZ", tm.tm_year + 1900, tm.tm_mon + 1, tm.tm_mday,
                tm.tm_hour, tm.tm_min, tm.tm_sec, static_cast<int>(ms));
  return buf;
}

EventLog::EventLog(std::filesystem::path file, std::string session_id)
    : file_(std::move(file)), session_id_(std::move(session_id)) {
  if (std::filesystem::exists(file_)) {
    const auto existing = read_log(file_);
    for (const auto& r : existing.records) next_seq_ = std::max<std::int64_t>(next_seq_, r.value("seq", 0) + 1);
  }
}

void EventLog::append(std::vector<Json> records) {
  std::lock_guard lock(mu_);
  std::string out;
  const std::string ts = iso_timestamp();
  for (auto& r : records) {
    r["ts"] = ts;
    r["seq"] = next_seq_++;
    r["session_id"] = session_id_;
    out += r.dump();
    out += '\n';
  }
  std::ofstream f(file_, std::ios::app | std::ios::binary);
  if (!f) throw UpstreamError("LogWriteFailed", "cannot open event log " + file_.string());
  f.write(out.data(), static_cast<std::streamsize>(out.size()));
  f.flush();
  if (!f) throw UpstreamError("LogWriteFailed", "cannot write event log " + file_.string());
}

LogContents read_log(const std::filesystem::path& file) {
  std::ifstream f(file, std::ios::binary);
  if (!f) throw NotFoundError("LogNotFound", "cannot open event log " + file.string());
  std::stringstream ss;
  ss << f.rdbuf();
  const std::string text = ss.str();
  LogContents out;
  const auto lines = util::split_lines(text);
  // An unterminated final line is an interrupted write.
  const bool unterminated = !text.empty() && text.back() != '\n';
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (util::trim(lines[i]).empty()) continue;
    const bool last = i + 1 == lines.size();
    try {
      Json j = Json::parse(lines[i]);
      if (!j.is_object()) throw ValidationError("BadRecord", "record is not an object");
      if (last && unterminated) {
        out.truncated = true;
        continue;
      }
      out.records.push_back(std::move(j));
    } catch (const std::exception&) {
      if (last) {
        out.truncated = true;
      } else {
        out.errors.push_back("line " + std::to_string(i + 1) + " is not a JSON object");
      }
    }
  }
  return out;
}

namespace {

std::string state_name(const Json& v) { return v.is_string() ? v.get<std::string>() : v.dump(); }

}  // namespace

ReplayResult replay_records(const std::vector<Json>& records, const std::filesystem::path& data_dir) {
  ReplayResult r;
  r.trajectory.push_back(DialogueState::data_visualization);
  auto violate = [&](std::string what) { r.violations.push_back(std::move(what)); };

  std::int64_t last_seq = -1;
  std::string session_id;
  std::string created_at;
  std::shared_ptr<const dataset::Dataset> data;
  bool have_session = false;
  DialogueState current = DialogueState::data_visualization;
  // State changes seen in the open turn; applied when the turn commits.
  std::vector<std::pair<DialogueState, DialogueState>> pending;

  auto check_snapshot = [&](const Json& snap, std::int64_t seq) -> bool {
    Session s;
    try {
      s = Session::from_snapshot(snap, data);
    } catch (const Error& e) {
      violate("seq " + std::to_string(seq) + ": " + e.what());
      return false;
    }
    if (s.state != current) {
      violate("seq " + std::to_string(seq) + ": snapshot state " + std::string(to_string(s.state)) +
              " disagrees with state " + std::string(to_string(current)));
    }
    if (s.petel && (s.state == DialogueState::data_visualization || s.state == DialogueState::task_selection)) {
      violate("seq " + std::to_string(seq) + ": PeTEL present in state " + std::string(to_string(s.state)));
    }
    r.session = std::move(s);
    return true;
  };

  for (const auto& rec : records) {
    const std::int64_t seq = rec.value("seq", static_cast<std::int64_t>(-1));
    if (seq <= last_seq) violate("seq " + std::to_string(seq) + " does not increase");
    last_seq = seq;
    const std::string kind = rec.value("kind", "");
    if (!have_session && kind != "session") {
      violate("seq " + std::to_string(seq) + ": record before the session record");
      continue;
    }
    if (kind == "session") {
      if (have_session) violate("seq " + std::to_string(seq) + ": second session record");
      have_session = true;
      session_id = rec.value("session_id", "");
      created_at = rec.value("created_at", "");
      r.session.id = session_id;
      r.session.created_at = created_at;
    } else if (kind == "dataset") {
      const std::string file = rec.value("file", "");
      if (!file.empty() && !data_dir.empty() && std::filesystem::exists(data_dir / file)) {
        auto d = dataset::load_csv_file(data_dir / file);
        d.name = rec.value("name", d.name);
        data = std::make_shared<const dataset::Dataset>(std::move(d));
      }
      if (rec.contains("snapshot")) check_snapshot(rec["snapshot"], seq);
      pending.clear();
    } else if (kind == "state_change") {
      const auto from = normalize_state(state_name(rec.value("from", Json())));
      const auto to = normalize_state(state_name(rec.value("to", Json())));
      if (!from || !to) {
        violate("seq " + std::to_string(seq) + ": unknown state in state change");
        continue;
      }
      const DialogueState base = pending.empty() ? current : pending.back().second;
      if (*from != base) {
        violate("seq " + std::to_string(seq) + ": state change from " + std::string(to_string(*from)) +
                " but session is in " + std::string(to_string(base)));
      }
      if (!is_allowed(*from, *to)) {
        violate("seq " + std::to_string(seq) + ": transition " + std::string(to_string(*from)) + " -> " +
                std::string(to_string(*to)) + " is not allowed");
      }
      pending.emplace_back(*from, *to);
    } else if (kind == "utterance") {
      if (rec.value("role", "") != "assistant") continue;
      for (const auto& [from, to] : pending) {
        current = to;
        if (r.trajectory.back() != to) r.trajectory.push_back(to);
      }
      pending.clear();
      if (!rec.contains("snapshot")) {
        violate("seq " + std::to_string(seq) + ": assistant utterance without snapshot");
        continue;
      }
      if (check_snapshot(rec["snapshot"], seq)) ++r.committed_turns;
    } else if (kind == "error") {
      pending.clear();
      ++r.failed_turns;
    } else if (kind != "agent_call") {
      violate("seq " + std::to_string(seq) + ": unknown record kind '" + kind + "'");
    }
  }
  if (!have_session) violate("log has no session record");
  r.session.id = session_id;
  r.session.created_at = created_at;
  if (!r.session.dataset) r.session.dataset = data;
  return r;
}

ReplayResult replay_log(const std::filesystem::path& file) {
  const auto contents = read_log(file);
  auto r = replay_records(contents.records, file.parent_path());
  r.truncated = contents.truncated;
  for (const auto& e : contents.errors) r.violations.push_back(e);
  return r;
}

std::string trajectory_text(const std::vector<DialogueState>& trajectory) {
  std::vector<std::string> names;
  for (auto s : trajectory) names.emplace_back(to_string(s));
  return util::join(names, " → ");
}

}  // namespace dschat::dialogue
