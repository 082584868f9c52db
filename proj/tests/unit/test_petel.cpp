#include <doctest.h>

#include <fstream>
#include <set>
#include <sstream>

#include "dschat/gateway/json_extract.hpp"
#include "dschat/petel/agents.hpp"
#include "dschat/util/text.hpp"
#include "fakes.hpp"
#include "gen.hpp"
#include "petel_gen.hpp"

using namespace dschat;
using namespace dschat::petel;
using testgen::canned;
using testgen::Rng;
using testgen::random_petel;
using testgen::random_slot_value;

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string fixture(const std::string& name) {
  return read_file(std::string(DSCHAT_SOURCE_DIR) + "/data/fixtures/" + name);
}

std::string asset(const std::string& path) { return read_file(std::string(DSCHAT_SOURCE_DIR) + "/assets/prompts/" + path); }

Petel flight_petel() { return parse_petel(fixture("flight_delay.petel")); }

}  // namespace

TEST_CASE("empty classification template") {
  const Petel p = parse_petel(fixture("classification_empty.petel"));
  CHECK(p.problem_type() == MlTask::classification);
  CHECK(p.schema().slots.size() == 10);
  const auto c = is_complete(p);
  CHECK_FALSE(c.complete);
  CHECK(c.missing == std::vector<std::string>{"target_variable", "features", "dataset_size", "performance_metrics",
                                               "validation_method", "classification_methods"});
  CHECK(next_unfilled_slot(p) == std::optional<std::string>("target_variable"));
  // two all-null filter rows keep data_filters unfilled
  CHECK_FALSE(p.is_filled("data_filters"));
  CHECK(progress(p).filled.empty());
}

TEST_CASE("filled descriptor example") {
  const Petel p = flight_petel();
  CHECK(is_complete(p).complete);
  CHECK(p.scalar_text("target_variable") == std::optional<std::string>("delay_severity"));
  CHECK(p.get("dataset_size") == Json("10000/Default"));
  CHECK(p.list_text("classification_methods").size() == 7);
  const auto f = p.filters();
  REQUIRE(f.size() == 2);
  CHECK(f[0].column == "delay_duration");
  CHECK(f[0].condition == Condition::greater_than);
  CHECK(f[0].value == Json(15));
  CHECK(f[1].value == Json("JFK"));
  CHECK(p.list_text("business_goals").front() == "reduce customer complaints");
  CHECK(next_unfilled_slot(p) == std::nullopt);
}

TEST_CASE("serialization order and format") {
  const std::string s = serialize_petel(flight_petel());
  CHECK(util::starts_with(s, "{\n  \"problem_type\": \"classification\",\n  \"target_variable\""));
  std::size_t last = 0;
  for (const auto& slot : schema_for(MlTask::classification).slots) {
    const auto pos = s.find("\"" + slot.name + "\"");
    REQUIRE(pos != std::string::npos);
    CHECK(pos > last);
    last = pos;
  }
  // strict JSON
  CHECK(Json::accept(s));
}

TEST_CASE("round trip property") {
  Rng rng(2024);
  for (int i = 0; i < 1000; ++i) {
    const Petel p = random_petel(rng);
    const std::string s = serialize_petel(p);
    const Petel back = parse_petel(s);
    REQUIRE_MESSAGE(back == p, s);
    CHECK(serialize_petel(back) == s);
  }
}

TEST_CASE("slot synonyms and problem type spellings") {
  const Petel p = parse_petel(
      "{problem_type: Time Series Forecasting, target_variables: [flight_delays], horizon: 1 month, "
      "time_series_forecasting_methods: [arima], metrics: mae}");
  CHECK(p.problem_type() == MlTask::time_series);
  CHECK(p.get("target_variable") == Json::array({"flight_delays"}));
  CHECK(p.get("forecast_horizon") == Json("1 month"));
  CHECK(p.get("time_series_methods") == Json::array({"arima"}));
  CHECK(p.get("performance_metrics") == Json::array({"mae"}));
  CHECK(parse_petel("{\"Problem Type\": \"classification\", \"methods\": \"svm\"}").get("classification_methods") ==
        Json::array({"svm"}));
}

TEST_CASE("parse errors") {
  CHECK_THROWS_AS(parse_petel("{problem_type: classification, colour: red}"), UnknownSlot);
  CHECK_THROWS_AS(parse_petel("{problem_type: astrology}"), TypeMismatch);
  CHECK_THROWS_WITH_AS(parse_petel("{target_variable: x}"), doctest::Contains("problem_type"), ValidationError);
  CHECK_THROWS_AS(parse_petel("{problem_type: classification, target_variable: [a, b]}"), TypeMismatch);
  CHECK_THROWS_AS(parse_petel("{problem_type: classification, features: [{a: 1}]}"), TypeMismatch);
  CHECK_THROWS_AS(parse_petel("{problem_type: classification, dataset_size: lots}"), TypeMismatch);
  CHECK_THROWS_AS(parse_petel("{problem_type: classification, dataset_size: 0}"), TypeMismatch);
  CHECK_THROWS_AS(parse_petel("{problem_type: classification, target_variable: __skipped__}"), TypeMismatch);
  CHECK_THROWS_AS(
      parse_petel("{problem_type: classification, data_filters: [{column: a, condition: roughly, value: 1}]}"),
      TypeMismatch);
  CHECK_THROWS_AS(
      parse_petel("{problem_type: classification, data_filters: [{column: a, condition: between, value: [5, 1]}]}"),
      TypeMismatch);
  CHECK_THROWS_AS(
      parse_petel("{problem_type: classification, data_filters: [{column: a, condition: equals, value: [1, 2]}]}"),
      TypeMismatch);
  CHECK_THROWS_AS(
      parse_petel("{problem_type: classification, data_filters: [{column: a, op: equals, value: 1}]}"), TypeMismatch);
  CHECK_THROWS_AS(parse_petel("not a petel"), ValidationError);
}

TEST_CASE("value coercion") {
  Petel p(MlTask::classification);
  p.set("dataset_size", "10,000 rows");
  CHECK(p.get("dataset_size") == Json(10000));
  p.set("dataset_size", "all");
  CHECK(p.get("dataset_size") == Json("Default"));
  p.set("dataset_size", "500 / default");
  CHECK(p.get("dataset_size") == Json("500/Default"));
  p.set("dataset_size", Json::array({2000}));
  CHECK(p.get("dataset_size") == Json(2000));
  p.set("features", "age");
  CHECK(p.get("features") == Json::array({"age"}));
  p.set("features", Json::array());
  CHECK_FALSE(p.is_filled("features"));
  p.set("data_filters", Json{{"column", "age"}, {"condition", ">="}, {"value", 18}});
  REQUIRE(p.filters().size() == 1);
  CHECK(p.filters()[0].condition == Condition::greater_equal);
  p.set("data_filters", Json{{"column", "city"}, {"condition", "in"}, {"value", "Oslo"}});
  CHECK(p.filters()[0].value == Json::array({"Oslo"}));
  p.set("model_preferences", "None");
  CHECK(p.get("model_preferences").is_null());
  CHECK_THROWS_AS(p.set("colour", "red"), UnknownSlot);
}

TEST_CASE("condition spellings") {
  CHECK(parse_condition("greater than") == Condition::greater_than);
  CHECK(parse_condition(">") == Condition::greater_than);
  CHECK(parse_condition("Less-Than") == Condition::less_than);
  CHECK(parse_condition("==") == Condition::equals);
  CHECK(parse_condition("at least") == Condition::greater_equal);
  CHECK(parse_condition("<=") == Condition::less_equal);
  CHECK(parse_condition("not equal to") == Condition::not_equals);
  CHECK(parse_condition("between") == Condition::between);
  CHECK(parse_condition("in") == Condition::in);
  CHECK(parse_condition("approximately") == std::nullopt);
  for (int c = 0; c < 8; ++c) {
    CHECK(parse_condition(to_string(static_cast<Condition>(c))) == static_cast<Condition>(c));
  }
}

TEST_CASE("ask order") {
  const auto& c = schema_for(MlTask::classification).ask_order;
  CHECK(c == std::vector<std::string>{"target_variable", "dataset_size", "features", "performance_metrics",
                                       "validation_method", "classification_methods", "data_filters",
                                       "business_goals", "additional_requirements", "model_preferences"});
  CHECK(schema_for(MlTask::clustering).ask_order.front() == "features");
  CHECK(schema_for(MlTask::time_series).ask_order[1] == "forecast_horizon");
}

TEST_CASE("schemas") {
  for (MlTask t : kAllTasks) {
    const auto& s = schema_for(t);
    std::set<std::string> names;
    for (const auto& slot : s.slots) {
      CHECK(names.insert(slot.name).second);
      CHECK_FALSE(slot.description.empty());
    }
    CHECK_FALSE(s.methods_slot().empty());
    CHECK(s.find(s.methods_slot())->required);
    CHECK(s.find("data_filters") != nullptr);
    CHECK(s.ask_order.size() == s.slots.size());
    CHECK_FALSE(s.find("data_filters")->required);
  }
  CHECK_FALSE(schema_for(MlTask::clustering).has_target());
  CHECK(schema_for(MlTask::clustering).methods_slot() == "clustering_methods");
  CHECK(schema_for(MlTask::regression).methods_slot() == "regression_methods");
  CHECK(schema_for(MlTask::time_series).find("forecast_horizon")->required);
}

TEST_CASE("slot filling terminates in schema order") {
  Rng rng(5);
  for (MlTask t : kAllTasks) {
    Petel p(t);
    std::vector<std::string> visited;
    int steps = 0;
    while (auto next = next_unfilled_slot(p)) {
      REQUIRE(++steps <= 20);
      visited.push_back(*next);
      const Slot& s = *p.schema().find(*next);
      Json v = random_slot_value(rng, s);
      while (v.is_null() || v == Json(kSkipped)) v = random_slot_value(rng, s);
      p.set(*next, v);
    }
    CHECK(visited.size() == p.schema().slots.size());
    CHECK(visited == p.schema().ask_order);
    // every required slot is asked before any optional one
    std::size_t last_required = 0, first_optional = visited.size();
    for (std::size_t i = 0; i < visited.size(); ++i) {
      if (p.schema().find(visited[i])->required) {
        last_required = i;
      } else {
        first_optional = std::min(first_optional, i);
      }
    }
    CHECK(last_required < first_optional);
    CHECK(is_complete(p).complete);
  }
}

TEST_CASE("skipping the optional phase") {
  Petel p = flight_petel();
  p.set("business_goals", nullptr);
  p.set("model_preferences", nullptr);
  CHECK(next_unfilled_slot(p) == std::optional<std::string>("business_goals"));
  const Petel q = skip_optional(p);
  CHECK(next_unfilled_slot(q) == std::nullopt);
  CHECK(q.is_skipped("business_goals"));
  CHECK(q.get("features") == p.get("features"));
  CHECK(template_description(q).find("Business goals") == std::string::npos);
  CHECK(parse_petel(serialize_petel(q)) == q);
}

TEST_CASE("feeder demonstrations merge") {
  const Petel empty = parse_petel(asset("feeder/demo_01_user.txt").substr(asset("feeder/demo_01_user.txt").find('{')));
  Petel one = merge_feed_reply(empty, gateway::extract_object(asset("feeder/demo_01_assistant.txt")));
  CHECK(one.get("target_variable") == Json::array({"flight_delays"}));
  Petel two = merge_feed_reply(one, gateway::extract_object(asset("feeder/demo_02_assistant.txt")));
  CHECK(two.get("forecast_horizon") == Json("1 month"));
  CHECK(two.get("target_variable") == one.get("target_variable"));
}

TEST_CASE("merge rejects bad replies") {
  const Petel p = flight_petel();
  CHECK_THROWS_AS(merge_feed_reply(p, Json{{"problem_type", "regression"}}), FeedRejected);
  CHECK_THROWS_AS(merge_feed_reply(p, Json{{"colour", "red"}}), FeedRejected);
  CHECK_THROWS_AS(merge_feed_reply(p, Json{{"target_variable", nullptr}}), FeedRejected);
  CHECK_THROWS_AS(merge_feed_reply(p, Json{{"features", Json{{"a", 1}}}}), FeedRejected);
  CHECK_THROWS_AS(merge_feed_reply(p, Json::array()), FeedRejected);
  // modification of a filled slot is allowed
  const Petel q = merge_feed_reply(p, Json{{"problem_type", "Classification"}, {"model_preferences", "fast"}});
  CHECK(q.get("model_preferences") == Json("fast"));
  // absent slots keep their values
  CHECK(merge_feed_reply(p, Json::object()) == p);
}

TEST_CASE("feed retries once then keeps the input") {
  const Petel p = parse_petel(fixture("classification_empty.petel"));
  std::vector<std::string> dirs;
  auto gw = canned({"no json here", "{problem_type: classification, target_variable: final_grade}"}, &dirs);
  const auto r = feed(p, "I think I will use final grade", gw);
  CHECK_FALSE(r.rejected);
  CHECK(r.updated == std::vector<std::string>{"target_variable"});
  CHECK(r.petel.scalar_text("target_variable") == std::optional<std::string>("final_grade"));
  REQUIRE(dirs.size() == 2);
  CHECK(dirs[0].find("I think I will use final grade") != std::string::npos);
  CHECK(dirs[1].find("rejected") != std::string::npos);

  auto bad = canned({"{problem_type: regression}", "{problem_type: clustering}"});
  const auto r2 = feed(p, "x", bad);
  CHECK(r2.rejected);
  CHECK(r2.petel == p);
  CHECK(r2.updated.empty());
}

TEST_CASE("adversarial feeder replies never break the invariants") {
  Rng rng(77);
  int accepted = 0;
  for (int i = 0; i < 500; ++i) {
    const Petel before = random_petel(rng);
    auto gw = canned({testgen::adversarial_feed_reply(rng, before), testgen::adversarial_feed_reply(rng, before)});
    const auto r = feed(before, "utterance", gw);
    CHECK(r.petel.problem_type() == before.problem_type());
    for (const auto& s : before.schema().slots) {
      if (before.is_filled(s.name)) CHECK(r.petel.is_filled(s.name));
    }
    if (r.rejected) {
      CHECK(r.petel == before);
    } else {
      ++accepted;
    }
    // whatever came back is itself well-formed
    CHECK(parse_petel(serialize_petel(r.petel)) == r.petel);
  }
  CHECK(accepted > 50);
  CHECK(accepted < 500);
}

TEST_CASE("task selector") {
  auto demo = parse_task_choice(asset("task_selector/demo_02_assistant.txt"));
  REQUIRE(demo);
  CHECK(demo->task == MlTask::clustering);
  CHECK(parse_task_choice("{\"model\": \"Dimensionality Reduction\", \"reason\": \"r\"}")->task ==
        MlTask::dimensionality_reduction);
  CHECK_FALSE(parse_task_choice("{\"model\": \"astrology\"}"));
  CHECK_FALSE(parse_task_choice("classification"));

  std::vector<std::string> dirs;
  auto gw = canned({"I would go with classification.", "{'model': 'classification', 'reason': 'grades are labels'}"},
                   &dirs);
  const auto c = select_task("context", "Select problem", gw);
  CHECK(c.task == MlTask::classification);
  CHECK(c.reason == "grades are labels");
  REQUIRE(dirs.size() == 2);
  CHECK(dirs[1].find("one of classification, regression") != std::string::npos);

  auto bad = canned({"{}", "{\"model\": \"poetry\"}"});
  CHECK_THROWS_AS(select_task("c", "u", bad), InvalidTask);
}

TEST_CASE("seeker") {
  Petel p = parse_petel(fixture("classification_empty.petel"));
  std::vector<std::string> dirs;
  auto gw = canned({"Which column would you like to predict?", "   "}, &dirs);
  auto q = seek(p, "user picked classification", "students dataset", gw);
  REQUIRE(q);
  CHECK(q->slot == "target_variable");
  CHECK(q->question == "Which column would you like to predict?");
  CHECK_FALSE(q->optional_phase);
  CHECK(dirs[0].find("The next unidentified slot is target_variable.") != std::string::npos);
  CHECK(dirs[0].find("\"problem_type\": \"classification\"") != std::string::npos);

  p.set("target_variable", "final_grade");
  q = seek(p, "c", "s", gw);
  CHECK(q->fallback);
  CHECK(util::starts_with(q->question, "What value should be used for dataset_size? (how many rows to use, a number or Default for all rows)"));

  Petel f = flight_petel();
  f.set("business_goals", nullptr);
  auto gw2 = canned({"Any business goals?"});
  q = seek(f, "c", "s", gw2);
  CHECK(q->optional_phase);
  CHECK(q->question.find("optional (business_goals)") != std::string::npos);
  CHECK(q->question.find("skip") != std::string::npos);
  CHECK_FALSE(seek(skip_optional(f), "c", "s", gw2));
}

TEST_CASE("descriptor") {
  const Petel p = flight_petel();
  auto good = canned({asset("descriptor/demo_01_assistant.txt")});
  auto d = describe(p, good);
  CHECK_FALSE(d.fallback);
  CHECK(description_is_faithful(p, d.text));

  auto bad = canned({"This is a regression problem about prices."});
  d = describe(p, bad);
  CHECK(d.fallback);
  CHECK(d.text.find("delay_severity") != std::string::npos);
  CHECK(d.text.find("classification") != std::string::npos);
  CHECK(d.text.find("delay_duration greater_than 15") != std::string::npos);
  CHECK(d.text.find("departure_airport equals JFK") != std::string::npos);
  CHECK(description_is_faithful(p, d.text));

  auto empty = canned({""});
  CHECK(describe(p, empty).fallback);

  CHECK(description_is_faithful(p, "A Classification problem predicting delay-severity."));
  CHECK_FALSE(description_is_faithful(p, "A classification problem predicting lateness."));
}
