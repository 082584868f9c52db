// Acceptance run: one [PASS]/[FAIL] line per criterion, scripted provider and builtin backend only.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "detector_gen.hpp"
#include "dschat/dialogue/detector.hpp"
#include "dschat/dialogue/event_log.hpp"
#include "dschat/engineering/training.hpp"
#include "dschat/gateway/json_extract.hpp"
#include "dschat/gateway/template_store.hpp"
#include "dschat/petel/agents.hpp"
#include "fakes.hpp"
#include "gen.hpp"
#include "petel_gen.hpp"
#include "student_session.hpp"
#include "tables.hpp"

using namespace dschat;
using dialogue::DialogueState;
using dialogue::Intent;
using gateway::AgentId;
using testgen::Rng;

namespace {

const std::filesystem::path kRoot = DSCHAT_SOURCE_DIR;

// Collects failures; only the first few are reported.
class Check {
 public:
  void operator()(bool ok, const std::string& what) {
    if (ok) return;
    if (++failures_ <= 3) notes_.push_back(what);
  }
  int failures() const { return failures_; }
  std::string notes() const {
    std::string s;
    for (const auto& n : notes_) s += (s.empty() ? "" : "; ") + n;
    if (failures_ > 3) s += "; " + std::to_string(failures_ - 3) + " more";
    return s;
  }

 private:
  int failures_ = 0;
  std::vector<std::string> notes_;
};

struct Criterion {
  int number;
  std::string name;
  double limit_s;  // 0 means no limit
  std::function<void(Check&)> body;
};

std::string fmt_seconds(double s) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f s", s);
  return buf;
}

void student_session(Check& check) {
  const auto s = testgen::load_student_session(kRoot);
  const auto& g = s.golden;
  check(g.get("target_variable") == Json("final_grade") || g.get("target_variable") == Json::array({"final_grade"}),
        "golden target is final_grade");
  check(g.get("features").size() == 5, "golden has 5 features");
  check(g.get("performance_metrics") == Json::array({"accuracy", "f1_score", "confusion_matrix"}), "golden metrics");
  check(g.get("classification_methods").size() == 3, "golden has 3 methods");
  check(g.get("data_filters").size() == 2, "golden has 2 filters");

  auto run = testgen::run_student_session(s);
  const auto final = run.manager->get(run.id);
  check(run.provider->exhausted(), "script fully consumed");
  check(final.state == DialogueState::model_training, "final state model_training");
  std::vector<DialogueState> traj;
  for (auto st : run.states) {
    if (traj.empty() || traj.back() != st) traj.push_back(st);
  }
  check(traj == std::vector<DialogueState>{DialogueState::data_visualization, DialogueState::task_selection,
                                           DialogueState::task_formulation, DialogueState::model_training},
        "trajectory was " + dialogue::trajectory_text(traj));
  check(final.petel && *final.petel == g, "final PeTEL equals the golden object");
  if (final.petel) {
    check(petel::serialize_petel(*final.petel) == petel::serialize_petel(g), "serialized PeTEL equals the golden text");
  }
}

void whitelist(Check& check) {
  using S = DialogueState;
  const std::set<std::pair<S, S>> table = {{S::data_visualization, S::data_visualization},
                                           {S::data_visualization, S::task_selection},
                                           {S::task_selection, S::task_selection},
                                           {S::task_selection, S::task_formulation},
                                           {S::task_formulation, S::task_formulation},
                                           {S::task_formulation, S::model_training},
                                           {S::model_training, S::model_training}};
  int pairs = 0;
  for (auto from : dialogue::kAllStates) {
    for (auto to : dialogue::kAllStates) {
      ++pairs;
      check(dialogue::is_allowed(from, to) == (table.count({from, to}) == 1),
            std::string(to_string(from)) + " -> " + std::string(to_string(to)));
    }
  }
  check(pairs == 16, "16 pairs checked");

  Rng rng(9001);
  const testgen::DetectorReplies gen;
  const std::vector<S> states(dialogue::kAllStates.begin(), dialogue::kAllStates.end());
  int fallbacks = 0;
  for (int i = 0; i < 1000; ++i) {
    const S s = testgen::pick(rng, states);
    const auto a = gen.next(rng);
    const auto b = gen.next(rng);
    auto gw = testgen::canned({a.text, b.text});
    const auto d = dialogue::detect_intent_state("ctx", s, "utterance " + std::to_string(i), gw);
    check(d.current == s && dialogue::is_allowed(s, d.next), "whitelist violation at case " + std::to_string(i));
    auto valid = [&](const testgen::DetectorReply& r) { return r.parsed && dialogue::is_allowed(s, r.parsed->second); };
    if (valid(a)) {
      check(d.intent == a.parsed->first && d.next == a.parsed->second, "first valid reply not taken");
    } else if (valid(b)) {
      check(d.intent == b.parsed->first && d.next == b.parsed->second, "retry reply not taken");
    } else {
      ++fallbacks;
      check(d.fallback && d.intent == Intent::chitchat && d.next == s, "fallback is not {chitchat, s, s}");
    }
  }
  check(fallbacks > 0, "no case exercised the fallback");
}

void demonstrations(Check& check) {
  auto gw = testgen::demonstration_gateway();
  const std::string ctx = "The assistant suggested classification and regression for the flights dataset.";
  const auto first = dialogue::detect_intent_state(ctx, DialogueState::data_visualization,
                                                   "What details are included in the flight delay dataset?", gw);
  check(first.intent == Intent::get_dataset_info && first.reported_current == DialogueState::data_visualization &&
            first.next == DialogueState::data_visualization && !first.fallback,
        "first demonstration decision");
  const auto second = dialogue::detect_intent_state(ctx, DialogueState::data_visualization,
                                                    "I want to predict if a flight will be delayed or not", gw);
  check(second.intent == Intent::select_problem && second.reported_current == DialogueState::data_visualization &&
            second.next == DialogueState::task_selection && !second.fallback,
        "second demonstration decision");
}

void feeder(Check& check) {
  const std::string user1 = testgen::slurp(kRoot / "assets/prompts/feeder/demo_01_user.txt");
  const petel::Petel empty = petel::parse_petel(user1.substr(user1.find('{')));
  const auto reply = [](const char* f) {
    return gateway::extract_object(testgen::slurp(kRoot / "assets/prompts/feeder" / f));
  };
  const petel::Petel one = petel::merge_feed_reply(empty, reply("demo_01_assistant.txt"));
  const petel::Petel two = petel::merge_feed_reply(one, reply("demo_02_assistant.txt"));
  check(one.get("target_variable") == Json::array({"flight_delays"}), "demo 1 target_variable");
  check(two.get("forecast_horizon") == Json("1 month"), "demo 2 forecast_horizon");
  for (const auto& s : empty.schema().slots) {
    if (s.name != "target_variable") check(one.get(s.name) == empty.get(s.name), "demo 1 changed " + s.name);
    if (s.name != "forecast_horizon") check(two.get(s.name) == one.get(s.name), "demo 2 changed " + s.name);
  }

  Rng rng(4242);
  for (int i = 0; i < 500; ++i) {
    const petel::Petel before = testgen::random_petel(rng);
    auto gw = testgen::canned({testgen::adversarial_feed_reply(rng, before), testgen::adversarial_feed_reply(rng, before)});
    const auto r = petel::feed(before, "utterance", gw);
    check(r.petel.problem_type() == before.problem_type(), "problem_type changed at case " + std::to_string(i));
    for (const auto& s : before.schema().slots) {
      if (before.is_filled(s.name)) check(r.petel.is_filled(s.name), s.name + " nullified at case " + std::to_string(i));
    }
  }
}

void filters(Check& check) {
  Rng rng(5150);
  const testgen::TableShape shape{1, 50, 4, 2, 6, 0.1};
  for (int i = 0; i < 1000; ++i) {
    const auto t = testgen::random_table(rng, shape);
    const auto& d = t.data;
    check(d.rows.size() <= 50 && d.columns.size() <= 6, "table exceeds the size bounds");
    std::vector<petel::FilterSpec> all;
    for (int k = testgen::uniform(rng, 0, 3); k > 0; --k) all.push_back(testgen::random_filter(rng, t));
    const auto joint = engineering::apply_filters(d, all);
    check(joint.row_ids == testgen::oracle_rows(d, all), "oracle mismatch at case " + std::to_string(i));

    // every split into three consecutive groups, grouped both ways
    for (std::size_t p = 0; p <= all.size(); ++p) {
      for (std::size_t q = p; q <= all.size(); ++q) {
        const std::vector<petel::FilterSpec> a(all.begin(), all.begin() + p), b(all.begin() + p, all.begin() + q),
            c(all.begin() + q, all.end());
        std::vector<petel::FilterSpec> bc = b;
        bc.insert(bc.end(), c.begin(), c.end());
        std::vector<petel::FilterSpec> ab = a;
        ab.insert(ab.end(), b.begin(), b.end());
        const auto left = engineering::apply_filters(engineering::apply_filters(d, ab), c);
        const auto right = engineering::apply_filters(engineering::apply_filters(d, a), bc);
        check(left.same_content(joint) && left.row_ids == joint.row_ids && right.same_content(joint) &&
                  right.row_ids == joint.row_ids,
              "composition differs at case " + std::to_string(i));
      }
    }
  }
}

void prep(Check& check) {
  Rng rng(6006);
  int encoded = 0;
  std::set<std::string> reasons;
  for (int i = 0; i < 200; ++i) {
    const auto t = testgen::random_prep_table(rng);
    const auto expected = testgen::oracle_drops(t.data, t.features);
    const std::string tag = " at case " + std::to_string(i);
    engineering::PreparedMatrix m;
    try {
      m = engineering::prep_data(t.data, {"y", t.features, {}}, petel::MlTask::classification);
    } catch (const ValidationError& e) {
      check(e.code() == "NoUsableFeatures" && expected.size() == t.features.size(), e.code() + tag);
      continue;
    }
    std::map<std::string, std::string> dropped;
    for (const auto& dc : m.dropped) dropped[dc.column] = dc.reason;
    for (const auto& [col, why] : expected) reasons.insert(why);
    ++encoded;
    check(dropped == expected, "dropped reasons differ" + tag);
    check(m.x.size() == t.data.rows.size() && m.y.size() == m.x.size(), "row count changed" + tag);
    for (const auto& row : m.x) {
      check(row.size() == m.columns.size(), "ragged row" + tag);
      for (double v : row) check(std::isfinite(v), "missing cell" + tag);
    }
    for (const auto& e : m.encoding) {
      if (e.kind != "one_hot") continue;
      for (const auto& row : m.x) {
        double sum = 0;
        for (std::size_t k = 0; k < e.width; ++k) sum += row[e.first + k];
        check(sum == 1.0, "one-hot group " + e.column + " does not sum to 1" + tag);
      }
    }
  }
  check(encoded >= 150, "only " + std::to_string(encoded) + " tables encoded");
  check(reasons.size() == 2, "not every drop reason was exercised");
}

void baseline(Check& check) {
  const auto d = dataset::load_csv_file(kRoot / "data/fixtures/baseline8.csv");
  check(d.row_count() == 8, "fixture has 8 rows");
  const auto p = petel::parse_petel(
      "{problem_type: classification, target_variable: label, features: [hours, score], dataset_size: Default, "
      "performance_metrics: [accuracy, f1_score, confusion_matrix], validation_method: cross_validation, "
      "classification_methods: [logistic_regression, random_forest_classifier]}");
  const auto m = engineering::prep_data(d, engineering::petel_to_attributes(p, d), p.problem_type());
  std::map<double, int> split;
  for (double y : m.y) ++split[y];
  check(split.size() == 2 && ((split.begin()->second == 5 && split.rbegin()->second == 3) ||
                              (split.begin()->second == 3 && split.rbegin()->second == 5)),
        "fixture class split is not 5/3");
  engineering::BuiltinBaselineBackend backend;
  const auto resp = engineering::dispatch(engineering::build_train_request(p, m), backend);
  const auto* row = resp.find("majority_class_baseline");
  check(row && row->status == "ok", "baseline row missing");
  if (row) check(row->metrics.at("accuracy").get<double>() == 0.625, "accuracy is " + row->metrics.at("accuracy").dump());
}

void extraction(Check& check) {
  Rng rng(8080);
  for (int i = 0; i < 1000; ++i) {
    const Json v = testgen::random_object(rng);
    const std::string s = v.dump();
    try {
      check(gateway::extract_json(s) == v, "round-trip failed at case " + std::to_string(i));
      const std::string wrapped = testgen::brace_free_prose(rng) + s + testgen::brace_free_prose(rng);
      check(gateway::extract_json(wrapped) == v, "wrapped extraction failed at case " + std::to_string(i));
    } catch (const Error& e) {
      check(false, e.code() + " at case " + std::to_string(i));
    }
  }
  for (int i = 0; i < 200; ++i) {
    bool raised = false;
    try {
      gateway::extract_json(testgen::brace_free_prose(rng));
    } catch (const gateway::NoJsonFound&) {
      raised = true;
    }
    check(raised, "brace-free text did not raise NoJsonFound");
  }
}

std::size_t sentences(const std::string& s) {
  std::size_t n = 0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if ((s[i] == '.' || s[i] == '?' || s[i] == '!') && (i + 1 == s.size() || s[i + 1] == ' ' || s[i + 1] == '\n')) ++n;
  }
  return n;
}

void teler(Check& check) {
  const gateway::Bindings sd = {{"context", "flights"}, {"conversation state", "data_visualization"}, {"user input", "hi"}};
  const gateway::Bindings ds = {{"history", "User: hi\nAssistant: hello"}};
  const gateway::Bindings cm = {{"context", "c"}, {"state", "s"},        {"input", "i"},
                                {"intent", "n"},  {"microprocess", "m"}, {"mp_resp", "r"}};
  const auto& store = gateway::TemplateStore::embedded();
  struct Ladder {
    AgentId agent;
    const gateway::Bindings* bindings;
    int top;
  };
  for (const Ladder& l : {Ladder{AgentId::state_detector, &sd, 3}, Ladder{AgentId::dialogue_summarizer, &ds, 3},
                          Ladder{AgentId::conversation_manager, &cm, 5}}) {
    const std::string name(gateway::to_string(l.agent));
    std::vector<int> want;
    for (int lvl = 0; lvl <= l.top; ++lvl) want.push_back(lvl);
    check(store.levels(l.agent) == want, name + " registered levels");
    std::string prev;
    for (int lvl = 0; lvl <= l.top; ++lvl) {
      const std::string cur = gateway::render_directive(l.agent, lvl, *l.bindings);
      const std::string at = name + " level " + std::to_string(lvl);
      check(cur.size() >= prev.size(), at + " is shorter than the level below");
      for (const auto& [k, v] : *l.bindings) check(cur.find(v) != std::string::npos, at + " lacks " + k);
      if (lvl == 1) check(sentences(cur) == 1, at + " is not one sentence");
      if (lvl >= 2) {
        check(sentences(cur) >= 2, at + " is not a paragraph");
        check(cur.rfind(store.directive_text(l.agent, lvl - 1).substr(0, 20), 0) == 0, at + " does not extend level below");
      }
      if (lvl >= 3) check(cur.find("\n- ") != std::string::npos, at + " has no bulleted subtasks");
      if (lvl >= 4) check(cur.find("explain") != std::string::npos, at + " has no explanation request");
      if (lvl >= 5) check(cur.find("evaluated") != std::string::npos, at + " has no evaluation guideline");
      prev = cur;
    }
    if (l.top == 3) {
      for (int lvl : {4, 5}) {
        bool raised = false;
        try {
          gateway::render_directive(l.agent, lvl, *l.bindings);
        } catch (const gateway::UnsupportedLevel&) {
          raised = true;
        }
        check(raised, name + " level " + std::to_string(lvl) + " did not raise UnsupportedLevel");
      }
    }
  }
}

}  // namespace

int main() {
  const std::vector<Criterion> criteria = {
      {1, "student session end to end reaches model_training with the golden PeTEL", 5, student_session},
      {2, "transition whitelist and 1000 adversarial detector replies", 10, whitelist},
      {3, "detector demonstrations reproduce their decisions", 0, demonstrations},
      {4, "feeder demonstrations and 500 adversarial whole-object feeds", 10, feeder},
      {5, "filters match the row-scan oracle on 1000 tables and compose", 30, filters},
      {6, "prep_data conservation on 200 tables", 0, prep},
      {7, "builtin baseline accuracy 0.625 on the 8-row fixture", 0, baseline},
      {8, "JSON extraction over 1000 values and brace-free text", 0, extraction},
      {9, "TELeR directive ladder", 0, teler},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    Check check;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      c.body(check);
    } catch (const std::exception& e) {
      check(false, std::string("threw: ") + e.what());
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (c.limit_s > 0 && secs >= c.limit_s) check(false, "over the " + fmt_seconds(c.limit_s) + " limit");
    const bool ok = check.failures() == 0;
    failed += !ok;
    std::printf("[%s] %d. %s (%s)%s\n", ok ? "PASS" : "FAIL", c.number, c.name.c_str(), fmt_seconds(secs).c_str(),
                ok ? "" : (": " + check.notes()).c_str());
  }
  std::printf("%zu of %zu criteria passed\n", criteria.size() - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
