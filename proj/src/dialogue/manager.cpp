#include "dschat/dialogue/manager.hpp"

#include <cstdio>
#include <fstream>

#include "dschat/dataset/table.hpp"

namespace dschat::dialogue {

Json UploadReply::to_json() const {
  return {{"summary", summary.to_json()}, {"suggestions", suggestions.to_json()}, {"reply", reply}};
}

Json MessageReply::to_json() const {
  return {{"reply", reply},
          {"state", to_string(state)},
          {"petel_progress", {{"filled", progress.filled}, {"missing", progress.missing}}},
          {"failed", failed}};
}

petel::Progress session_progress(const Session& s) {
  if (s.petel) return petel::progress(*s.petel);
  if (s.selected_task) return petel::progress(petel::Petel(*s.selected_task));
  return {};
}

Json session_record(const Session& s) {
  const auto p = session_progress(s);
  return {{"session_id", s.id},
          {"created_at", s.created_at},
          {"state", to_string(s.state)},
          {"dataset", s.dataset ? Json(s.dataset->name) : Json()},
          {"petel", s.petel ? Json::parse(s.petel->to_json().dump()) : Json()},
          {"last_summary", s.context},
          {"turn_count", s.turn_count},
          {"petel_progress", {{"filled", p.filled}, {"missing", p.missing}}}};
}

SessionManager::SessionManager(Engine engine, ManagerOptions options)
    : engine_(std::move(engine)), options_(std::move(options)), rng_(options_.seed) {
  if (!options_.data_dir.empty()) std::filesystem::create_directories(options_.data_dir);
}

std::filesystem::path SessionManager::log_path(const std::string& id) const {
  return options_.data_dir / (id + ".jsonl");
}

std::string SessionManager::new_id() {
  std::lock_guard lock(id_mu_);
  for (;;) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(rng_()));
    std::string id = buf;
    std::shared_lock map_lock(map_mu_);
    if (sessions_.count(id)) continue;
    if (!options_.data_dir.empty() && std::filesystem::exists(log_path(id))) continue;
    return id;
  }
}

std::shared_ptr<SessionManager::Entry> SessionManager::find(const std::string& id) const {
  std::shared_lock lock(map_mu_);
  auto it = sessions_.find(id);
  if (it == sessions_.end()) throw SessionNotFound(id);
  return it->second;
}

void SessionManager::write(Entry& e, std::vector<Json> records) {
  if (e.log) e.log->append(std::move(records));
}

std::string SessionManager::create() {
  auto e = std::make_shared<Entry>();
  e->session.id = new_id();
  e->session.created_at = iso_timestamp();
  if (!options_.data_dir.empty()) {
    e->log = std::make_unique<EventLog>(log_path(e->session.id), e->session.id);
    e->log->append({{{"kind", "session"}, {"turn", 0}, {"created_at", e->session.created_at}}});
  }
  std::unique_lock lock(map_mu_);
  sessions_[e->session.id] = e;
  return e->session.id;
}

UploadReply SessionManager::upload(const std::string& id, std::string_view csv, const std::string& name) {
  auto e = find(id);
  std::lock_guard lock(e->mu);
  auto data = dataset::load_table(csv, name);
  UploadOutcome out;
  try {
    out = engine_.upload(e->session, std::move(data));
  } catch (const Error& err) {
    write(*e, {{{"kind", "error"},
                {"turn", e->session.turn_count},
                {"code", err.code()},
                {"category", err.category() == ErrorCategory::upstream ? "upstream" : "validation"},
                {"message", err.what()}}});
    throw;
  }
  if (e->log) {
    const std::string file = id + ".dataset.csv";
    std::ofstream f(options_.data_dir / file, std::ios::binary | std::ios::trunc);
    f << dataset::to_csv(*out.session.dataset);
    if (!f) throw UpstreamError("LogWriteFailed", "cannot write dataset file " + file);
    out.records.push_back({{"kind", "dataset"},
                           {"turn", e->session.turn_count},
                           {"name", out.session.dataset->name},
                           {"rows", out.session.dataset->rows.size()},
                           {"columns", out.session.dataset->columns.size()},
                           {"file", file},
                           {"reply", out.reply},
                           {"snapshot", out.session.snapshot()}});
    write(*e, std::move(out.records));
  }
  e->session = out.session;
  return {*out.session.summary, *out.session.suggestions, out.reply};
}

MessageReply SessionManager::post_message(const std::string& id, const std::string& text) {
  auto e = find(id);
  std::lock_guard lock(e->mu);
  auto out = engine_.turn(e->session, text);
  write(*e, std::move(out.records));
  if (out.error) std::rethrow_exception(out.error);
  e->session = std::move(out.session);
  if (!out.failed && e->session.results && !options_.data_dir.empty()) {
    std::ofstream f(options_.data_dir / (id + ".results.json"), std::ios::binary | std::ios::trunc);
    f << e->session.results->to_json().dump(2) << '\n';
  }
  return {out.reply, e->session.state, session_progress(e->session), out.failed};
}

Session SessionManager::get(const std::string& id) const {
  auto e = find(id);
  std::lock_guard lock(e->mu);
  return e->session;
}

results::ResultSummary SessionManager::results(const std::string& id) const {
  auto e = find(id);
  std::lock_guard lock(e->mu);
  if (!e->session.results) throw NoResults();
  return *e->session.results;
}

std::vector<std::string> SessionManager::ids() const {
  std::shared_lock lock(map_mu_);
  std::vector<std::string> out;
  for (const auto& [id, _] : sessions_) out.push_back(id);
  return out;
}

std::string SessionManager::restore(const std::filesystem::path& log_file) {
  auto r = replay_log(log_file);
  if (!r.ok()) throw ValidationError("ReplayViolation", "event log " + log_file.string() + ": " + r.violations.front());
  auto e = std::make_shared<Entry>();
  e->session = std::move(r.session);
  if (!options_.data_dir.empty()) e->log = std::make_unique<EventLog>(log_file, e->session.id);
  const std::string id = e->session.id;
  std::unique_lock lock(map_mu_);
  if (sessions_.count(id)) throw ConflictError("SessionExists", "session " + id + " is already live");
  sessions_[id] = e;
  return id;
}

std::size_t SessionManager::restore_all() {
  if (options_.data_dir.empty() || !std::filesystem::exists(options_.data_dir)) return 0;
  std::size_t n = 0;
  for (const auto& entry : std::filesystem::directory_iterator(options_.data_dir)) {
    if (entry.path().extension() != ".jsonl") continue;
    try {
      restore(entry.path());
      ++n;
    } catch (const Error&) {
    }
  }
  return n;
}

}  // namespace dschat::dialogue
