#include <doctest.h>

#include <httplib.h>

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <thread>

#include "dschat/engineering/training.hpp"
#include "dschat/util/text.hpp"
#include "gen.hpp"
#include "tables.hpp"

using namespace dschat;
using namespace dschat::engineering;
using dataset::ColumnKind;
using dataset::Dataset;
using petel::Condition;
using petel::FilterSpec;
using petel::MlTask;
using petel::Petel;
using testgen::Rng;

namespace {

const std::string kFixtures = std::string(DSCHAT_SOURCE_DIR) + "/data/fixtures/";

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Dataset table(const std::string& csv) { return dataset::load_table(csv, "t"); }

Petel student_petel() {
  return petel::parse_petel(R"({
    problem_type: classification,
    target_variable: final_grade,
    features: [study_hours, attendance, participation, homework_scores, test_scores],
    dataset_size: 10000,
    performance_metrics: [accuracy, f1_score, confusion_matrix],
    validation_method: k_fold_cross_validation,
    classification_methods: [random_forest_classifier, svm_classifier, logistic_regression],
    data_filters: [
      {column: attendance, condition: greater_than, value: 75},
      {column: study_hours, condition: greater_than, value: 1}
    ],
    business_goals: [identify students at risk],
    additional_requirements: [model interpretability],
    model_preferences: "higher accuracy, interpretable"
  })");
}

// Runs a server on a free port for the lifetime of the object.
struct LocalServer {
  httplib::Server server;
  std::thread thread;
  int port = 0;

  void start() {
    port = server.bind_to_any_port("127.0.0.1");
    thread = std::thread([this] { server.listen_after_bind(); });
    server.wait_until_ready();
  }
  std::string url() const { return "http://127.0.0.1:" + std::to_string(port); }
  ~LocalServer() {
    server.stop();
    if (thread.joinable()) thread.join();
  }
};

}  // namespace

TEST_CASE("column resolution") {
  const Dataset d = table("Study Hours,G1,G2,G3,final-score\n1,2,3,4,5\n");
  CHECK(resolve_column(d, "study_hours") == 0);
  CHECK(resolve_column(d, "STUDY-HOURS") == 0);
  CHECK(resolve_column(d, "final score") == 4);
  try {
    resolve_column(d, "final grade");
    FAIL("expected UnknownColumn");
  } catch (const UnknownColumn& e) {
    CHECK(e.name() == "final grade");
    CHECK(e.candidates().size() == 3);
    CHECK(e.code() == "UnknownColumn");
  }
  // no semantic matching: G3 holds the final grade but the name does not match
  const Dataset g = table("G1,G2,G3,age,failures\n1,2,3,4,5\n");
  CHECK_THROWS_AS(resolve_column(g, "final grade"), UnknownColumn);
  // candidates are the three smallest edit distances
  const auto near = nearest_columns(g, "final grade");
  REQUIRE(near.size() == 3);
  std::size_t worst = 0;
  for (const auto& c : near) worst = std::max(worst, util::levenshtein("final_grade", util::normalize_name(c)));
  for (const auto& c : g.columns) {
    if (std::find(near.begin(), near.end(), c.name) == near.end()) {
      CHECK(util::levenshtein("final_grade", util::normalize_name(c.name)) >= worst);
    }
  }
}

TEST_CASE("petel to attributes") {
  const Dataset d = dataset::load_csv_file(kFixtures + "student_performance.csv");
  const Petel p = student_petel();
  auto plan = petel_to_attributes(p, d);
  CHECK(plan.target == std::optional<std::string>("final_grade"));
  CHECK(plan.feature_columns.size() == 5);
  Petel q = p;
  q.set("features", Json::array({"study_hours", "attendance"}));
  CHECK(petel_to_attributes(q, d).feature_columns.size() == 2);
  q.set("features", "all");
  CHECK(petel_to_attributes(q, d).feature_columns.size() == d.column_count() - 1);
  q.set("features", Json::array({"study_hours", "Final Grade"}));
  CHECK_THROWS_AS(petel_to_attributes(q, d), TargetInFeatures);
  q.set("features", Json::array({"study_hours", "shoe_size"}));
  CHECK_THROWS_AS(petel_to_attributes(q, d), UnknownColumn);
  q.set("target_variable", "final grade");
  q.set("features", Json::array({"study_hours"}));
  CHECK(petel_to_attributes(q, d).target == std::optional<std::string>("final_grade"));
  Petel empty(MlTask::classification);
  CHECK_THROWS_WITH_AS(petel_to_attributes(empty, d), doctest::Contains("target_variable"), ValidationError);

  Petel clus(MlTask::clustering);
  clus.set("features", "all");
  clus.set("dataset_size", "Default");
  clus.set("performance_metrics", "silhouette");
  clus.set("validation_method", "holdout");
  clus.set("clustering_methods", "kmeans");
  auto cp = petel_to_attributes(clus, d);
  CHECK_FALSE(cp.target);
  CHECK(cp.feature_columns.size() == d.column_count());
}

TEST_CASE("filter examples") {
  const Dataset d = table("d,airport\n10,JFK\n16,LGA\n20,JFK\n");
  CHECK(apply_filters(d, {}).same_content(d));
  CHECK(apply_filters(d, {{"d", Condition::greater_than, 15}}).row_count() == 2);
  CHECK(apply_filters(d, {{"d", Condition::greater_than, "15"}}).row_count() == 2);
  CHECK(apply_filters(d, {{"airport", Condition::equals, "JFK"}}).row_ids == std::vector<std::size_t>{0, 2});
  CHECK(apply_filters(d, {{"d", Condition::between, Json::array({10, 16})}}).row_count() == 2);
  CHECK(apply_filters(d, {{"airport", Condition::in, Json::array({"LGA", "EWR"})}}).row_count() == 1);
  CHECK_THROWS_AS(apply_filters(d, {{"d", Condition::equals, "JFK"}}), IncompatibleCondition);
  CHECK_THROWS_AS(apply_filters(d, {{"airport", Condition::greater_than, 3}}), IncompatibleCondition);
  CHECK_THROWS_AS(apply_filters(d, {{"gate", Condition::equals, "A"}}), UnknownColumn);
  // row ids refer to the original table after repeated filtering
  const Dataset once = apply_filters(d, {{"d", Condition::greater_than, 12}});
  CHECK(apply_filters(once, {{"airport", Condition::equals, "JFK"}}).row_ids == std::vector<std::size_t>{2});
  // missing cells never pass, not even not_equals
  const Dataset m = table("a,b\n1,x\n,y\n3,\n");
  CHECK(apply_filters(m, {{"a", Condition::not_equals, 1}}).row_count() == 1);
  CHECK(apply_filters(m, {{"b", Condition::not_equals, "x"}}).row_count() == 1);
}

TEST_CASE("flight filters leave the expected rows") {
  const Dataset d = dataset::load_csv_file(kFixtures + "flights_toy.csv");
  const Petel p = petel::parse_petel(read_file(kFixtures + "flight_delay.petel"));
  const Dataset f = apply_filters(d, p.filters());
  CHECK(f.row_count() == 6);
  const auto sev = resolve_column(d, "delay_severity");
  int severe = 0;
  for (const auto& r : f.rows) severe += *r[sev] == "severe";
  CHECK(severe == 4);
}

TEST_CASE("filters match the row-scan oracle and compose") {
  Rng rng(31337);
  for (int i = 0; i < 1000; ++i) {
    const auto t = testgen::random_table(rng);
    const Dataset& d = t.data;
    REQUIRE(d.columns[0].kind == ColumnKind::numeric);
    std::vector<FilterSpec> f1, f2;
    for (int k = testgen::uniform(rng, 0, 2); k > 0; --k) f1.push_back(testgen::random_filter(rng, t));
    for (int k = testgen::uniform(rng, 0, 2); k > 0; --k) f2.push_back(testgen::random_filter(rng, t));
    std::vector<FilterSpec> all = f1;
    all.insert(all.end(), f2.begin(), f2.end());

    const Dataset joint = apply_filters(d, all);
    REQUIRE(joint.row_ids == testgen::oracle_rows(d, all));
    const Dataset staged = apply_filters(apply_filters(d, f1), f2);
    CHECK(staged.same_content(joint));
    CHECK(staged.row_ids == joint.row_ids);
  }
}

TEST_CASE("prep numeric identity") {
  const Dataset d = table("a,b,y\n1,10,p\n2,20,q\n3,35,p\n");
  const auto m = prep_data(d, {"y", {"a", "b"}, {}}, MlTask::classification);
  CHECK(m.x == std::vector<std::vector<double>>{{1, 10}, {2, 20}, {3, 35}});
  CHECK(m.y == std::vector<double>{0, 1, 0});
  CHECK(m.labels == std::vector<std::string>{"p", "q"});
  for (const auto& e : m.encoding) CHECK(e.kind == "identity");
  CHECK(m.row_index == std::vector<std::size_t>{0, 1, 2});
}

TEST_CASE("prep one-hot, imputation and drops") {
  const Dataset d = table("cat,num,const,empty,y\nb,1,k,,p\na,,k,,q\nc,5,k,,p\n,3,k,,q\n");
  const auto m = prep_data(d, {"y", {"cat", "num", "const", "empty"}, {}}, MlTask::classification);
  REQUIRE(m.encoding.size() == 2);
  const auto& cat = m.encoding[0];
  CHECK(cat.kind == "one_hot");
  CHECK(cat.categories == std::vector<std::string>{"a", "b", "c"});
  CHECK(cat.fill == "a");  // mode tie goes to the lexically smallest
  CHECK(m.columns == std::vector<std::string>{"cat=a", "cat=b", "cat=c", "num"});
  for (const auto& row : m.x) CHECK(row[0] + row[1] + row[2] == 1.0);
  CHECK(m.x[3][0] == 1.0);
  CHECK(m.x[1][3] == 3.0);  // median of 1, 5, 3
  CHECK(m.encoding[1].imputed == 1);
  CHECK(m.dropped == std::vector<DroppedColumn>{{"const", "constant"}, {"empty", "all values missing"}});
  CHECK(std::any_of(m.notes.begin(), m.notes.end(), [](const std::string& n) { return n.find("outliers") != std::string::npos; }));
}

TEST_CASE("prep errors") {
  const Dataset one = table("a,y\n1,p\n2,p\n");
  try {
    prep_data(one, {"y", {"a"}, {}}, MlTask::classification);
    FAIL("expected DegenerateTarget");
  } catch (const DegenerateTarget& e) {
    CHECK(e.distinct_count() == 1);
  }
  const Dataset d = table("a,y\n1,p\n2,q\n");
  CHECK_THROWS_AS(prep_data(apply_filters(d, {{"a", Condition::greater_than, 9}}), {"y", {"a"}, {}}, MlTask::classification),
                  EmptyAfterFilter);
  CHECK_THROWS_AS(prep_data(table("a,y\n1,p\n1,q\n"), {"y", {"a"}, {}}, MlTask::classification), ValidationError);
  // regression target rows that are not numbers are left out
  const auto r = prep_data(table("a,y\n1,2.5\n2,x\n3,4\n"), {"y", {"a"}, {}}, MlTask::regression);
  CHECK(r.y == std::vector<double>{2.5, 4});
  CHECK(r.row_index == std::vector<std::size_t>{0, 2});
}

TEST_CASE("prep datetime columns") {
  CHECK(datetime_days("1970-01-02") == std::optional<double>(1.0));
  CHECK(datetime_days("1970-01-01T12:00") == std::optional<double>(0.5));
  CHECK_FALSE(datetime_days("2023-02-30"));
  const Dataset d = table("t,y\n2023-03-01T08:00,a\n2023-03-02T08:00,b\n");
  const auto m = prep_data(d, {"y", {"t"}, {}}, MlTask::classification);
  CHECK(m.encoding[0].kind == "datetime_days");
  CHECK(m.x[1][0] - m.x[0][0] == doctest::Approx(1.0));
}

TEST_CASE("prep conserves rows and encodes completely") {
  Rng rng(808);
  int ran = 0;
  for (int i = 0; i < 200; ++i) {
    const Dataset d = testgen::random_table(rng).data;
    std::vector<std::string> features;
    for (const auto& c : d.columns) features.push_back(c.name);
    const std::string target = features.back();
    features.pop_back();
    PreparedMatrix m;
    try {
      m = prep_data(d, {target, features, {}}, MlTask::classification);
    } catch (const ValidationError& e) {
      // tiny random tables may have one class or no usable feature
      CHECK((e.code() == "DegenerateTarget" || e.code() == "NoUsableFeatures" || e.code() == "EmptyAfterFilter"));
      continue;
    }
    ++ran;
    CHECK(m.y.size() == m.x.size());
    CHECK(m.row_index.size() == m.x.size());
    std::set<std::size_t> ids(m.row_index.begin(), m.row_index.end());
    CHECK(ids.size() == m.row_index.size());
    for (auto id : m.row_index) CHECK(id < d.row_count());
    std::size_t width = 0;
    for (const auto& e : m.encoding) {
      CHECK(e.first == width);
      width += e.width;
      if (e.kind == "one_hot") {
        for (const auto& row : m.x) {
          double s = 0;
          for (std::size_t k = 0; k < e.width; ++k) s += row[e.first + k];
          CHECK(s == 1.0);
        }
      }
    }
    CHECK(width == m.columns.size());
    for (const auto& row : m.x) {
      CHECK(row.size() == width);
      for (double v : row) CHECK(std::isfinite(v));
    }
    CHECK(m.encoding.size() + m.dropped.size() == features.size());
  }
  CHECK(ran > 100);
}

TEST_CASE("metric and method names") {
  CHECK(canonical_metric("F1 Score") == "f1_score");
  CHECK(canonical_metric("f1") == "f1_score");
  CHECK(canonical_metric("Accuracy") == "accuracy");
  CHECK(canonical_metric("mean squared error") == "mse");
  CHECK(canonical_metric("confusion matrix") == "confusion_matrix");
  CHECK_THROWS_AS(canonical_metric("awesomeness"), UnknownMetric);
  CHECK(canonical_method("random forest", MlTask::classification) == "random_forest_classifier");
  CHECK(canonical_method("SVM", MlTask::classification) == "svm_classifier");
  CHECK(canonical_method("Logistic Regression", MlTask::classification) == "logistic_regression");
  CHECK(canonical_method("k-nearest neighbors", MlTask::classification) == "knn_classifier");
  CHECK(canonical_method("random_forest_regression", MlTask::regression) == "random_forest_regressor");
  CHECK(canonical_method("k-means", MlTask::clustering) == "kmeans");
  CHECK_THROWS_AS(canonical_method("kmeans", MlTask::classification), UnknownMethod);
  CHECK_THROWS_AS(canonical_method("magic", MlTask::regression), UnknownMethod);
  CHECK(parse_validation("cross_validation") == Validation{"cross_validation", 5, 0.2});
  CHECK(parse_validation("k_fold_cross_validation").folds == 5);
  CHECK(parse_validation("10-fold cross validation").folds == 10);
  CHECK(parse_validation("holdout").kind == "holdout");
  CHECK(parse_validation("80/20 train test split").split == doctest::Approx(0.2));
  CHECK_THROWS_AS(parse_validation("vibes"), ValidationError);
}

TEST_CASE("train request from the flight example") {
  const Dataset d = dataset::load_csv_file(kFixtures + "flights_toy.csv");
  const Petel p = petel::parse_petel(read_file(kFixtures + "flight_delay.petel"));
  const auto plan = petel_to_attributes(p, d);
  const auto m = prep_data(d, plan, p.problem_type());
  const auto r = build_train_request(p, m);
  CHECK(r.methods.size() == 7);
  CHECK(r.methods[5] == "xgboost_classifier");
  CHECK(std::find(r.metrics.begin(), r.metrics.end(), "f1_score") != r.metrics.end());
  CHECK(r.validation == Validation{"cross_validation", 5, 0.2});
  CHECK(r.x.size() == d.row_count());  // 10000/Default with 16 rows: all of them
  CHECK(r.advisory["additional_requirements"] == Json::array({"robust to outliers", "handle class imbalance"}));
  CHECK(r.advisory["model_preferences"] == "interpretable");
  const Json wire = r.to_wire();
  CHECK(wire["validation"] == Json{{"kind", "cross_validation"}, {"folds", 5}});
  CHECK(TrainRequest::from_wire(wire).to_wire() == wire);

  Petel bad = p;
  bad.set("performance_metrics", Json::array({"accuracy", "awesomeness"}));
  CHECK_THROWS_AS(build_train_request(bad, m), UnknownMetric);
  bad = p;
  bad.set("classification_methods", Json::array({"telepathy"}));
  CHECK_THROWS_AS(build_train_request(bad, m), UnknownMethod);
}

TEST_CASE("subsampling is seeded") {
  const Dataset d = dataset::load_csv_file(kFixtures + "student_performance.csv");
  Petel p = student_petel();
  const auto m = prep_data(d, petel_to_attributes(p, d), p.problem_type());
  CHECK(build_train_request(p, m).x.size() == m.x.size());
  p.set("dataset_size", "Default");
  CHECK(build_train_request(p, m).x.size() == m.x.size());
  p.set("dataset_size", 10);
  const auto a = build_train_request(p, m, 7);
  const auto b = build_train_request(p, m, 7);
  const auto c = build_train_request(p, m, 8);
  CHECK(a.x.size() == 10);
  CHECK(a.to_wire() == b.to_wire());
  CHECK(a.row_index == b.row_index);
  CHECK(a.row_index != c.row_index);
  CHECK(a.request_id != c.request_id);
  CHECK(std::is_sorted(a.row_index.begin(), a.row_index.end()));
  p.set("dataset_size", "12/Default");
  CHECK(build_train_request(p, m).x.size() == 12);
}

TEST_CASE("builtin baseline scores the majority class") {
  const Dataset d = dataset::load_csv_file(kFixtures + "baseline8.csv");
  Petel p = petel::parse_petel(
      "{problem_type: classification, target_variable: label, features: [hours, score], dataset_size: Default, "
      "performance_metrics: [accuracy, f1_score, confusion_matrix], validation_method: cross_validation, "
      "classification_methods: [logistic_regression, random_forest_classifier]}");
  const auto m = prep_data(d, petel_to_attributes(p, d), p.problem_type());
  const auto req = build_train_request(p, m);
  BuiltinBaselineBackend backend;
  const auto resp = dispatch(req, backend);
  REQUIRE(resp.per_method.size() == 3);
  CHECK(resp.per_method[0].method == "logistic_regression");
  CHECK(resp.per_method[0].status == "failed");
  CHECK(resp.per_method[1].status == "failed");
  const auto* base = resp.find("majority_class_baseline");
  REQUIRE(base);
  CHECK(base->status == "ok");
  CHECK(base->metrics["accuracy"].get<double>() == 0.625);
  CHECK(base->metrics["confusion_matrix"] == Json::array({Json::array({0, 3}), Json::array({0, 5})}));
  CHECK(base->message.find("pass") != std::string::npos);
  // pure: same matrix, same response
  CHECK(dispatch(req, backend).to_wire() == resp.to_wire());

  // regression uses the mean
  Petel r = petel::parse_petel(
      "{problem_type: regression, target_variable: score, features: [hours], dataset_size: Default, "
      "performance_metrics: [mse, r2], validation_method: holdout, regression_methods: [linear_regression]}");
  const auto rm = prep_data(d, petel_to_attributes(r, d), r.problem_type());
  const auto rr = dispatch(build_train_request(r, rm), backend);
  const auto* mean = rr.find("mean_baseline");
  REQUIRE(mean);
  CHECK(mean->metrics["r2"].get<double>() == 0.0);
  CHECK(mean->metrics["mse"].get<double>() > 0);
}

TEST_CASE("metric arithmetic") {
  const auto c = classification_metrics({0, 0, 1, 1}, {0, 1, 1, 1}, 2, {"accuracy", "precision", "recall", "f1_score"});
  CHECK(c["accuracy"].get<double>() == 0.75);
  // class 0: p=1 r=.5 ; class 1: p=2/3 r=1
  CHECK(c["precision"].get<double>() == doctest::Approx((1.0 + 2.0 / 3.0) / 2));
  CHECK(c["recall"].get<double>() == doctest::Approx(0.75));
  CHECK(c["f1_score"].get<double>() == doctest::Approx((2.0 / 3.0 + 0.8) / 2));
  const auto r = regression_metrics({1, 2, 3}, {1, 2, 5}, {"mse", "mae", "rmse", "r2"});
  CHECK(r["mse"].get<double>() == doctest::Approx(4.0 / 3));
  CHECK(r["mae"].get<double>() == doctest::Approx(2.0 / 3));
  CHECK(r["r2"].get<double>() == doctest::Approx(1 - 4.0 / 2));
}

TEST_CASE("response validation") {
  const TrainRequest req = TrainRequest::from_wire(Json::parse(read_file(kFixtures + "wire/train_request.json")));
  const Json body = Json::parse(read_file(kFixtures + "wire/train_response.json"));
  const auto resp = parse_train_response(req, body);
  REQUIRE(resp.per_method.size() == 3);
  CHECK(resp.per_method[0].metrics["accuracy"].get<double>() == doctest::Approx(0.8333333));
  CHECK(resp.per_method[1].wall_time_s == doctest::Approx(0.204));
  CHECK(resp.per_method[2].status == "failed");
  CHECK(parse_train_response(req, resp.to_wire()).to_wire() == resp.to_wire());

  Json missing = body;
  missing["per_method"].erase("random_forest_classifier");
  CHECK_THROWS_AS(parse_train_response(req, missing), ProtocolError);
  Json wrong_id = body;
  wrong_id["request_id"] = "other";
  CHECK_THROWS_AS(parse_train_response(req, wrong_id), ProtocolError);
  Json bad_status = body;
  bad_status["per_method"]["logistic_regression"]["status"] = "great";
  CHECK_THROWS_AS(parse_train_response(req, bad_status), ProtocolError);
  Json bad_metric = body;
  bad_metric["per_method"]["logistic_regression"]["metrics"]["accuracy"] = "high";
  CHECK_THROWS_AS(parse_train_response(req, bad_metric), ProtocolError);
  CHECK_THROWS_AS(TrainRequest::from_wire(Json{{"request_id", "x"}}), ProtocolError);
}

TEST_CASE("http backend speaks the wire protocol") {
  LocalServer srv;
  Json last_request;
  bool drop_method = false;
  srv.server.Get("/v1/capabilities", [](const httplib::Request&, httplib::Response& res) {
    res.set_content(Json{{"methods", {"logistic_regression", "gradient_boosting_classifier"}},
                         {"metrics", {"accuracy", "f1_score"}}}
                        .dump(),
                    "application/json");
  });
  srv.server.Post("/v1/train", [&](const httplib::Request& req, httplib::Response& res) {
    last_request = Json::parse(req.body);
    CHECK(req.get_header_value("Content-Type") == "application/json");
    Json per = Json::object();
    for (const auto& m : last_request["methods"]) {
      per[m.get<std::string>()] = {{"status", "ok"}, {"metrics", {{"accuracy", 0.5}}}, {"message", ""}};
    }
    if (drop_method) per.erase(per.begin());
    res.set_content(Json{{"request_id", last_request["request_id"]}, {"per_method", per}, {"wall_time_s", Json::object()}}.dump(),
                    "application/json");
  });
  srv.start();

  TrainRequest req = TrainRequest::from_wire(Json::parse(read_file(kFixtures + "wire/train_request.json")));
  HttpBackend backend(srv.url());
  const auto caps = backend.capabilities();
  CHECK(caps.methods.size() == 2);
  const auto resp = dispatch(req, backend, std::chrono::seconds(5));
  CHECK(last_request["methods"] == Json::array({"logistic_regression", "gradient_boosting_classifier"}));
  CHECK(last_request["data"]["x"].size() == 6);
  CHECK(last_request["validation"]["folds"] == 2);
  REQUIRE(resp.per_method.size() == 3);
  CHECK(resp.per_method[0].method == "logistic_regression");
  CHECK(resp.per_method[1].method == "random_forest_classifier");
  CHECK(resp.per_method[1].status == "failed");
  CHECK(resp.per_method[1].message.find("not offered") != std::string::npos);
  CHECK(resp.per_method[2].method == "xgboost_classifier");
  CHECK(resp.per_method[2].status == "ok");
  CHECK(resp.per_method[2].message.find("ran as gradient_boosting_classifier") != std::string::npos);

  drop_method = true;
  CHECK_THROWS_AS(dispatch(req, backend, std::chrono::seconds(5)), ProtocolError);
}

TEST_CASE("builtin answers over http too") {
  LocalServer srv;
  BuiltinBaselineBackend builtin;
  srv.server.Get("/v1/capabilities", [&](const httplib::Request&, httplib::Response& res) {
    const auto c = builtin.capabilities();
    res.set_content(Json{{"methods", c.methods}, {"metrics", c.metrics}}.dump(), "application/json");
  });
  srv.server.Post("/v1/train", [&](const httplib::Request& req, httplib::Response& res) {
    res.set_content(builtin.train(Json::parse(req.body), std::chrono::seconds(1)).dump(), "application/json");
  });
  srv.start();
  TrainRequest req = TrainRequest::from_wire(Json::parse(read_file(kFixtures + "wire/train_request.json")));
  req.methods = {"majority_class_baseline"};
  HttpBackend backend(srv.url() + "/");
  const auto resp = dispatch(req, backend, std::chrono::seconds(5));
  REQUIRE(resp.find("majority_class_baseline"));
  CHECK(resp.find("majority_class_baseline")->metrics["accuracy"].get<double>() == doctest::Approx(4.0 / 6));
}

TEST_CASE("backend transport errors") {
  HttpBackend dead("http://127.0.0.1:1");
  const TrainRequest req = TrainRequest::from_wire(Json::parse(read_file(kFixtures + "wire/train_request.json")));
  CHECK_THROWS_AS(dispatch(req, dead, std::chrono::seconds(2)), BackendUnreachable);
  try {
    dead.capabilities();
  } catch (const Error& e) {
    CHECK(e.category() == ErrorCategory::upstream);
  }

  LocalServer srv;
  srv.server.Get("/v1/capabilities", [](const httplib::Request&, httplib::Response& res) {
    res.set_content("[]", "application/json");
  });
  srv.server.Post("/v1/train", [](const httplib::Request&, httplib::Response& res) {
    std::this_thread::sleep_for(std::chrono::milliseconds(600));
    res.set_content("{}", "application/json");
  });
  srv.start();
  HttpBackend slow(srv.url());
  CHECK_THROWS_AS(slow.capabilities(), ProtocolError);
  CHECK_THROWS_AS(slow.train(req.to_wire(), std::chrono::milliseconds(150)), BackendTimeout);
  CHECK(make_backend("builtin")->id() == "builtin");
  CHECK(make_backend(srv.url())->id() == srv.url());
  CHECK_THROWS_AS(make_backend("ftp://x"), ValidationError);
}
