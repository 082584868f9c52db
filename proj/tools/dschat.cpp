// dschat: serve, chat, replay, summarize, run-petel.
// Exit codes: 0 ok, 2 usage, 3 validation, 4 provider or backend failure.

#include <CLI11.hpp>

#include <csignal>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>

#include "dschat/dataset/miniature.hpp"
#include "dschat/dataset/summary.hpp"
#include "dschat/dataset/table.hpp"
#include "dschat/dialogue/event_log.hpp"
#include "dschat/dialogue/manager.hpp"
#include "dschat/engineering/engineering.hpp"
#include "dschat/engineering/training.hpp"
#include "dschat/results/results.hpp"
#include "dschat/service/config.hpp"
#include "dschat/service/server.hpp"

using namespace dschat;

namespace {

constexpr int kExitUsage = 2;
constexpr int kExitValidation = 3;
constexpr int kExitUpstream = 4;

int exit_code(const Error& e) { return e.category() == ErrorCategory::upstream ? kExitUpstream : kExitValidation; }

std::string read_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw ValidationError("FileNotFound", "cannot read " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

std::string stem(const std::string& path) { return std::filesystem::path(path).stem().string(); }

// Provider options shared by chat and summarize.
struct ProviderFlags {
  std::string scripted;
  bool strict = false;
  std::optional<int> level;
  std::string config;

  void add(CLI::App* app) {
    app->add_option("--scripted", scripted, "Scripted transcript (JSONL) instead of the HTTP provider");
    app->add_flag("--strict", strict, "Scripted entries must be consumed in order");
    app->add_option("--level", level, "Directive level for the ladder agents (0-5)")->check(CLI::Range(0, 5));
    app->add_option("--config", config, "Service config file");
  }

  service::ServiceConfig service_config() const {
    service::ServiceConfig c = config.empty() ? service::ServiceConfig() : service::ServiceConfig::from_file(config);
    c = c.with_env();
    if (!scripted.empty()) c.script = scripted;
    if (strict) c.script_strict = true;
    if (level) c.teler_level = level;
    return c;
  }
};

std::string progress_line(const petel::Progress& p) {
  const std::size_t total = p.filled.size() + p.missing.size();
  if (total == 0) return "no task yet";
  return std::to_string(p.filled.size()) + "/" + std::to_string(total) + " slots filled";
}

int cmd_serve(const service::ServiceConfig& cfg) {
  auto manager = std::make_shared<dialogue::SessionManager>(service::make_engine(cfg),
                                                            dialogue::ManagerOptions{cfg.data_dir, cfg.seed});
  const auto restored = manager->restore_all();
  service::Server server(manager, {cfg.cors_origin, cfg.bearer_token, cfg.threads});
  const int port = server.bind(cfg.host, cfg.port);
  std::cout << "dschat listening on http://" << cfg.host << ":" << port << " (data " << cfg.data_dir.string() << ", "
            << restored << " sessions restored)" << std::endl;
  static service::Server* running = &server;
  std::signal(SIGINT, [](int) { running->stop(); });
  std::signal(SIGTERM, [](int) { running->stop(); });
  server.listen();
  return 0;
}

int cmd_chat(const ProviderFlags& pf, const std::string& dataset_path, const std::string& utterances_path,
             const std::string& data_dir, const std::string& backend, std::uint64_t seed, bool as_json) {
  auto cfg = pf.service_config();
  if (!backend.empty()) cfg.backend = backend;
  cfg.seed = seed;
  std::vector<std::string> scripted_turns;
  bool from_file = !utterances_path.empty();
  if (from_file) {
    const auto j = Json::parse(read_file(utterances_path));
    for (const auto& u : j.at("utterances")) scripted_turns.push_back(u.get<std::string>());
  }
  auto data = dataset::load_csv_file(dataset_path);
  dialogue::SessionManager manager(service::make_engine(cfg), {data_dir, seed});
  const auto id = manager.create();
  const auto up = manager.upload(id, dataset::to_csv(data), stem(dataset_path));

  Json turns = Json::array();
  if (!as_json) std::cout << "[data_visualization] " << up.reply << "\n";
  std::size_t next = 0;
  for (;;) {
    std::string line;
    if (from_file) {
      if (next >= scripted_turns.size()) break;
      line = scripted_turns[next++];
      if (!as_json) std::cout << "> " << line << "\n";
    } else {
      if (!as_json) std::cout << "> " << std::flush;
      if (!std::getline(std::cin, line)) break;
      if (line == "/quit" || line == "/exit") break;
      if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    }
    const auto r = manager.post_message(id, line);
    if (as_json) {
      Json t = r.to_json();
      t["text"] = line;
      turns.push_back(std::move(t));
    } else {
      std::cout << "[" << dialogue::to_string(r.state) << " | " << progress_line(r.progress) << "] " << r.reply
                << "\n";
    }
  }
  const auto s = manager.get(id);
  if (as_json) {
    Json out = {{"session", dialogue::session_record(s)}, {"welcome", up.reply}, {"turns", turns}};
    if (s.results) out["results"] = s.results->to_json();
    if (!data_dir.empty()) out["log"] = manager.log_path(id).string();
    std::cout << out.dump(2) << "\n";
  } else if (!data_dir.empty()) {
    std::cout << "event log: " << manager.log_path(id).string() << "\n";
  }
  return 0;
}

int cmd_replay(const std::string& log, bool as_json) {
  const auto r = dialogue::replay_log(log);
  if (as_json) {
    Json traj = Json::array();
    for (auto st : r.trajectory) traj.push_back(dialogue::to_string(st));
    std::cout << Json{{"session", dialogue::session_record(r.session)},
                      {"trajectory", traj},
                      {"committed_turns", r.committed_turns},
                      {"failed_turns", r.failed_turns},
                      {"truncated", r.truncated},
                      {"violations", r.violations}}
                     .dump(2)
              << "\n";
  } else {
    std::cout << dialogue::trajectory_text(r.trajectory) << "\n";
    std::cout << "turns: " << r.committed_turns << " committed, " << r.failed_turns << " failed"
              << (r.truncated ? ", last line truncated" : "") << "\n";
    if (r.session.petel) std::cout << petel::serialize_petel(*r.session.petel) << "\n";
    for (const auto& v : r.violations) std::cerr << "violation: " << v << "\n";
  }
  return r.ok() ? 0 : kExitValidation;
}

int cmd_summarize(const ProviderFlags& pf, const std::string& dataset_path, bool as_json) {
  auto data = dataset::load_csv_file(dataset_path);
  data.name = stem(dataset_path);
  const auto gw = service::make_gateway(pf.service_config());
  const auto mini = dataset::miniaturize(data);
  const auto summary = dataset::summarize_dataset(mini, gw, &data);
  const auto tasks = dataset::suggest_tasks(summary, gw);
  if (as_json) {
    std::cout << Json{{"summary", summary.to_json()}, {"suggestions", tasks.to_json()}}.dump(2) << "\n";
  } else {
    std::cout << summary.render() << "\n\nSuggested tasks:\n";
    for (const auto& t : tasks.tasks) std::cout << "- " << petel::display_name(t.task) << ": " << t.rationale << "\n";
  }
  return 0;
}

int cmd_run_petel(const std::string& petel_path, const std::string& dataset_path, const std::string& backend_spec,
                  std::uint64_t seed, bool as_json) {
  const auto p = petel::parse_petel(read_file(petel_path));
  auto data = dataset::load_csv_file(dataset_path);
  const auto filtered = engineering::apply_filters(data, p.filters());
  const auto plan = engineering::petel_to_attributes(p, filtered);
  const auto matrix = engineering::prep_data(filtered, plan, p.problem_type());
  const auto request = engineering::build_train_request(p, matrix, seed);
  auto backend = engineering::make_backend(backend_spec);
  const auto response = engineering::dispatch(request, *backend);
  const auto summary = results::summarize_results(response, p);
  if (as_json) {
    std::cout << Json{{"request_id", request.request_id},
                      {"rows", matrix.x.size()},
                      {"notes", request.notes},
                      {"results", summary.to_json()}}
                     .dump(2)
              << "\n";
  } else {
    std::cout << "rows after filters: " << filtered.rows.size() << " of " << data.rows.size() << "\n";
    std::cout << results::render_template(summary) << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Conversational data-science assistant"};
  app.require_subcommand(1);
  bool as_json = false;
  app.add_flag("--json", as_json, "Structured output")->configurable(false);

  auto* serve = app.add_subcommand("serve", "Run the HTTP service");
  std::string serve_config;
  std::string host, data_dir_s, script, backend_s, token, cors;
  int port = -1, threads = 0;
  std::optional<int> level;
  long long seed_s = -1;
  serve->add_option("--config", serve_config, "JSON config file");
  serve->add_option("--host", host);
  serve->add_option("--port", port)->check(CLI::Range(0, 65535));
  serve->add_option("--data-dir", data_dir_s);
  serve->add_option("--scripted", script, "Scripted transcript instead of the HTTP provider");
  serve->add_option("--backend", backend_s, "builtin or a training backend URL");
  serve->add_option("--level", level, "Directive level for the ladder agents (0-5)")->check(CLI::Range(0, 5));
  serve->add_option("--seed", seed_s)->check(CLI::NonNegativeNumber);
  serve->add_option("--token", token, "Require this bearer token");
  serve->add_option("--cors-origin", cors);
  serve->add_option("--threads", threads)->check(CLI::PositiveNumber);

  auto* chat = app.add_subcommand("chat", "Chat in the terminal over a local session");
  ProviderFlags chat_pf;
  chat_pf.add(chat);
  std::string chat_dataset, chat_utterances, chat_dir, chat_backend;
  std::uint64_t chat_seed = 0;
  chat->add_option("--dataset", chat_dataset, "CSV file")->required()->check(CLI::ExistingFile);
  chat->add_option("--utterances", chat_utterances, "JSON file {\"utterances\": [...]} instead of stdin")
      ->check(CLI::ExistingFile);
  chat->add_option("--data-dir", chat_dir, "Write the event log here");
  chat->add_option("--backend", chat_backend, "builtin or a training backend URL");
  chat->add_option("--seed", chat_seed);

  auto* replay = app.add_subcommand("replay", "Replay an event log and check its invariants");
  std::string log;
  replay->add_option("--log", log, "Event log (JSONL)")->required()->check(CLI::ExistingFile);

  auto* summarize = app.add_subcommand("summarize", "Dataset summary and task suggestions");
  ProviderFlags sum_pf;
  sum_pf.add(summarize);
  std::string sum_dataset;
  summarize->add_option("--dataset", sum_dataset, "CSV file")->required()->check(CLI::ExistingFile);

  auto* run = app.add_subcommand("run-petel", "Filter, prepare, train and rank for a PeTEL file");
  std::string run_petel, run_dataset, run_backend = "builtin";
  std::uint64_t run_seed = 0;
  run->add_option("--petel", run_petel, "PeTEL file")->required()->check(CLI::ExistingFile);
  run->add_option("--dataset", run_dataset, "CSV file")->required()->check(CLI::ExistingFile);
  run->add_option("--backend", run_backend, "builtin or a training backend URL");
  run->add_option("--seed", run_seed);

  for (auto* sub : {serve, chat, replay, summarize, run}) sub->add_flag("--json", as_json, "Structured output");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (*serve) {
      auto cfg = serve_config.empty() ? service::ServiceConfig() : service::ServiceConfig::from_file(serve_config);
      cfg = cfg.with_env();
      if (!host.empty()) cfg.host = host;
      if (port >= 0) cfg.port = port;
      if (!data_dir_s.empty()) cfg.data_dir = data_dir_s;
      if (!script.empty()) cfg.script = script;
      if (!backend_s.empty()) cfg.backend = backend_s;
      if (level) cfg.teler_level = level;
      if (seed_s >= 0) cfg.seed = static_cast<std::uint64_t>(seed_s);
      if (!token.empty()) cfg.bearer_token = token;
      if (!cors.empty()) cfg.cors_origin = cors;
      if (threads) cfg.threads = threads;
      return cmd_serve(cfg);
    }
    if (*chat) return cmd_chat(chat_pf, chat_dataset, chat_utterances, chat_dir, chat_backend, chat_seed, as_json);
    if (*replay) return cmd_replay(log, as_json);
    if (*summarize) return cmd_summarize(sum_pf, sum_dataset, as_json);
    if (*run) return cmd_run_petel(run_petel, run_dataset, run_backend, run_seed, as_json);
  } catch (const Error& e) {
    if (as_json) std::cout << service::error_body(e.code(), e.what()).dump() << "\n";
    std::cerr << "error: " << e.code() << ": " << e.what() << "\n";
    return exit_code(e);
  } catch (const Json::exception& e) {
    if (as_json) std::cout << service::error_body("MalformedInput", e.what()).dump() << "\n";
    std::cerr << "error: MalformedInput: " << e.what() << "\n";
    return kExitValidation;
  }
  return kExitUsage;
}
