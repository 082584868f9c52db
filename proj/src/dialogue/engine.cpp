#include "dschat/dialogue/engine.hpp"

#include "dschat/engineering/engineering.hpp"
#include "dschat/petel/agents.hpp"
#include "dschat/util/text.hpp"

namespace dschat::dialogue {

namespace {

bool has_any_word(std::string_view text, std::initializer_list<std::string_view> words) {
  for (auto w : words) {
    if (util::find_word_ci(text, w) != std::string_view::npos) return true;
  }
  return false;
}

bool has_any_phrase(std::string_view text, std::initializer_list<std::string_view> phrases) {
  for (auto p : phrases) {
    if (util::contains_ci(text, p)) return true;
  }
  return false;
}

std::string normalized_quotes(std::string_view s) { return util::replace_all(std::string(s), "’", "'"); }

struct Route {
  DialogueState next;
  std::string microprocess;
  std::string mp_resp;
};

}  // namespace

bool is_affirmative(std::string_view utterance) {
  const std::string u = normalized_quotes(utterance);
  if (has_any_word(u, {"no", "not", "don't", "dont", "wait", "change", "nope"})) return false;
  return has_any_word(u, {"yes", "yeah", "yep", "sure", "ok", "okay", "proceed", "alright", "correct", "confirm",
                          "confirmed", "fine", "perfect", "great", "run", "start", "train"}) ||
         has_any_phrase(u, {"go ahead", "all right", "sounds good", "looks good", "seems good", "let's do", "do it"});
}

bool is_decline(std::string_view utterance) {
  const std::string u = normalized_quotes(utterance);
  return has_any_word(u, {"skip", "no", "none", "nothing", "nope"}) ||
         has_any_phrase(u, {"that's all", "that is all", "not needed", "no more", "without them", "without it"});
}

std::string welcome_message(const dataset::DatasetSummary& summary, const dataset::TaskSuggestion& suggestions) {
  std::vector<std::string> tasks;
  for (const auto& t : suggestions.tasks) tasks.push_back(petel::display_name(t.task));
  return "Welcome, I am your personal data scientist. I have processed the provided dataset for your convenience "
         "I present the summary here: " +
         summary.summary + ". I propose the following ML tasks for this dataset: " + util::join(tasks, ", ");
}

std::string confirmation_question() { return "Does this formulation look right? Say go ahead and I will train the models."; }

Json call_record_json(const gateway::CallRecord& call, int turn) {
  return {{"kind", "agent_call"},
          {"turn", turn},
          {"agent", gateway::to_string(call.agent)},
          {"level", call.level},
          {"fingerprint", call.fingerprint},
          {"directive", call.directive},
          {"reply", call.reply},
          {"provider", call.provider_id},
          {"attempts", call.attempts},
          {"latency_ms", call.latency.count()},
          {"error", call.error}};
}

Engine::Engine(gateway::Gateway gateway, EngineOptions options)
    : gateway_(std::move(gateway)), options_(std::move(options)) {
  if (!options_.backend) options_.backend = std::make_shared<engineering::BuiltinBaselineBackend>();
}

UploadOutcome Engine::upload(const Session& session, dataset::Dataset data) const {
  if (session.state != DialogueState::data_visualization) {
    throw ConflictError("DatasetLocked", "a dataset can only be uploaded while in data_visualization");
  }
  auto calls = std::make_shared<std::vector<Json>>();
  const int turn = session.turn_count;
  const auto gw = gateway_.with_observer([calls, turn](const gateway::CallRecord& c) {
    calls->push_back(call_record_json(c, turn));
  });

  auto shared = std::make_shared<const dataset::Dataset>(std::move(data));
  const auto mini = dataset::miniaturize(*shared, options_.budget, options_.seed);
  auto summary = dataset::summarize_dataset(mini, gw, shared.get());
  auto suggestions = dataset::suggest_tasks(summary, gw);

  UploadOutcome out;
  out.session = session;
  out.session.dataset = shared;
  out.session.summary = summary;
  out.session.suggestions = suggestions;
  out.session.selected_task.reset();
  if (session.context.empty() || session.turn_count == 0) {
    out.session.context = "The user uploaded the dataset " + shared->name + " (" +
                          std::to_string(shared->rows.size()) + " rows, " + std::to_string(shared->columns.size()) +
                          " columns). " + summary.summary;
  }
  out.reply = welcome_message(summary, suggestions);
  out.records = std::move(*calls);
  return out;
}

TurnOutcome Engine::turn(const Session& session, const std::string& utterance) const {
  if (util::trim(utterance).empty()) throw ValidationError("EmptyUtterance", "utterance is empty");

  auto calls = std::make_shared<std::vector<Json>>();
  const int turn_no = session.turn_count + 1;
  const auto gw = gateway_.with_observer([calls, turn_no](const gateway::CallRecord& c) {
    calls->push_back(call_record_json(c, turn_no));
  });

  TurnOutcome out;
  out.session = session;
  Json user_rec = {{"kind", "utterance"}, {"turn", turn_no}, {"role", "user"}, {"text", utterance}};

  auto fail = [&](const Error& e, std::exception_ptr rethrow) {
    out.session = session;
    out.failed = true;
    out.error_code = e.code();
    out.error = rethrow;
    if (!rethrow) {
      out.reply = "Sorry, I could not complete that step (" + std::string(e.what()) +
                  "). Could you rephrase or give the detail again?";
    }
    out.records.clear();
    out.records.push_back(user_rec);
    for (auto& c : *calls) out.records.push_back(c);
    const char* category = e.category() == ErrorCategory::validation ? "validation"
                           : e.category() == ErrorCategory::upstream ? "upstream"
                           : e.category() == ErrorCategory::conflict ? "conflict"
                                                                     : "not_found";
    out.records.push_back({{"kind", "error"},
                           {"turn", turn_no},
                           {"code", e.code()},
                           {"category", category},
                           {"message", e.what()},
                           {"reply", out.reply}});
  };

  try {
    Session s = session;
    const Decision d = detect_intent_state(s.context, s.state, utterance, gw);
    out.decision = d;
    if (!s.dataset && d.intent != Intent::chitchat) throw DatasetMissing();

    Route route{d.next, "chitchat", ""};
    const bool dataset_question = d.intent == Intent::get_dataset_info || d.intent == Intent::get_dataset_trend;
    if (d.intent == Intent::chitchat || dataset_question) route.next = s.state;

    auto dataset_answer = [&]() {
      route.microprocess = "dataset summarizer";
      if (!s.summary) return;
      route.mp_resp = d.intent == Intent::get_dataset_trend ? s.summary->trend : s.summary->render();
    };

    auto run_formulation = [&]() {
      route.next = DialogueState::task_formulation;
      if (!s.petel) {
        if (!s.selected_task) s.selected_task = petel::select_task(s.context, utterance, gw).task;
        s.petel = petel::Petel(*s.selected_task);
      }
      auto fed = petel::feed(*s.petel, utterance, gw);
      petel::Petel p = fed.petel;
      if (fed.updated.empty()) {
        const auto nx = petel::next_unfilled_slot(p);
        const auto* slot = nx ? p.schema().find(*nx) : nullptr;
        if (slot && !slot->required && is_decline(utterance)) p = petel::skip_optional(p);
      }
      if (!fed.updated.empty()) s.results.reset();
      s.petel = p;
      const std::string ds = s.summary ? s.summary->render() : std::string();
      if (auto q = petel::seek(p, s.context, ds, gw)) {
        route.microprocess = "seeker";
        route.mp_resp = q->question;
        s.awaiting_confirmation = false;
      } else {
        route.microprocess = "descriptor";
        route.mp_resp = petel::describe(p, gw).text + "\n\n" + confirmation_question();
        s.awaiting_confirmation = true;
      }
    };

    auto run_training = [&]() {
      const petel::Petel& p = *s.petel;
      const auto filtered = engineering::apply_filters(*s.dataset, p.filters());
      const auto plan = engineering::petel_to_attributes(p, filtered);
      const auto matrix = engineering::prep_data(filtered, plan, p.problem_type());
      const auto request = engineering::build_train_request(p, matrix, options_.seed);
      const auto response = engineering::dispatch(request, *options_.backend, options_.train_timeout);
      s.results = results::summarize_results(response, p);
      s.awaiting_confirmation = false;
      route.microprocess = "prediction engineering";
      route.mp_resp = results::render_results(*s.results, s.context, gw, options_.render_mode);
    };

    if (d.intent == Intent::chitchat) {
      // conversational reply only
    } else if (dataset_question) {
      dataset_answer();
    } else if (s.state == DialogueState::model_training) {
      route.microprocess = "result summarizer";
      if (s.results) route.mp_resp = results::render_template(*s.results);
    } else {
      switch (route.next) {
        case DialogueState::data_visualization:
          route.microprocess = "task suggestor";
          if (s.suggestions) route.mp_resp = s.suggestions->raw_text;
          break;
        case DialogueState::task_selection: {
          const auto choice = petel::select_task(s.context, utterance, gw);
          if (s.selected_task != choice.task) s.petel.reset();
          s.selected_task = choice.task;
          route.microprocess = "task selector";
          route.mp_resp = "Selected task: " + petel::display_name(choice.task) + ". " + choice.reason;
          break;
        }
        case DialogueState::task_formulation:
          run_formulation();
          break;
        case DialogueState::model_training: {
          const bool gate = s.petel && petel::is_complete(*s.petel).complete && s.awaiting_confirmation &&
                            (d.intent == Intent::problem_execution || is_affirmative(utterance));
          if (gate) {
            run_training();
          } else {
            run_formulation();
          }
          break;
        }
      }
    }

    std::string reply;
    const bool polished_results =
        route.microprocess == "prediction engineering" && options_.render_mode == results::RenderMode::polished;
    if (polished_results) {
      reply = route.mp_resp;
    } else {
      reply = util::trim(gw.call(gateway::AgentId::conversation_manager,
                                 {{"context", s.context},
                                  {"state", std::string(to_string(route.next))},
                                  {"input", utterance},
                                  {"intent", std::string(display_name(d.intent))},
                                  {"microprocess", route.microprocess},
                                  {"mp_resp", route.mp_resp}})
                             .raw_text);
      if (reply.empty()) reply = route.mp_resp;
      // Results replies must keep the recommendation.
      if (route.microprocess == "prediction engineering" && s.results &&
          !util::contains_ci(reply, s.results->recommended)) {
        reply = route.mp_resp;
      }
    }

    try {
      s.context = summarize_dialogue(s.history, utterance, reply, gw);
    } catch (const SummaryEmpty&) {
      if (s.context.empty()) s.context = utterance;
    }

    const DialogueState before = s.state;
    s.state = route.next;
    s.history.push_back({"user", utterance});
    s.history.push_back({"assistant", reply});
    s.turn_count = turn_no;

    out.session = std::move(s);
    out.reply = reply;
    out.microprocess = route.microprocess;
    out.records.push_back(user_rec);
    for (auto& c : *calls) out.records.push_back(c);
    if (route.next != before) {
      out.records.push_back({{"kind", "state_change"},
                             {"turn", turn_no},
                             {"from", to_string(before)},
                             {"to", to_string(route.next)},
                             {"intent", to_string(d.intent)}});
    }
    out.records.push_back({{"kind", "utterance"},
                           {"turn", turn_no},
                           {"role", "assistant"},
                           {"text", reply},
                           {"intent", to_string(d.intent)},
                           {"microprocess", route.microprocess},
                           {"snapshot", out.session.snapshot()}});
  } catch (const ValidationError& e) {
    fail(e, nullptr);
  } catch (const Error& e) {
    fail(e, std::current_exception());
  }
  return out;
}

}  // namespace dschat::dialogue
