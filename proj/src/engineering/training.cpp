#include "dschat/engineering/training.hpp"

#include <httplib.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <regex>
#include <set>

#include "dschat/util/text.hpp"

namespace dschat::engineering {

using petel::MlTask;

namespace {

std::uint64_t fnv1a(std::string_view s, std::uint64_t h = 1469598103934665603ULL) {
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

std::string hex(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

MlTask task_from_wire(const Json& v) {
  if (!v.is_string()) throw ProtocolError("task must be a string");
  auto t = petel::parse_task(v.get<std::string>());
  if (!t) throw ProtocolError("unknown task " + v.get<std::string>());
  return *t;
}

std::vector<std::string> string_list(const Json& v, const char* what) {
  if (!v.is_array()) throw ProtocolError(std::string(what) + " must be a list");
  std::vector<std::string> out;
  for (const auto& s : v) {
    if (!s.is_string()) throw ProtocolError(std::string(what) + " entries must be strings");
    out.push_back(s.get<std::string>());
  }
  return out;
}

}  // namespace

const std::vector<std::string>& canonical_metrics() {
  static const std::vector<std::string> m = {"accuracy", "precision", "recall", "f1_score", "confusion_matrix",
                                             "mse",      "mae",       "r2",     "rmse",     "silhouette"};
  return m;
}

std::string canonical_metric(std::string_view name) {
  static const std::map<std::string, std::string> syn = {
      {"acc", "accuracy"},
      {"f1", "f1_score"},
      {"f_score", "f1_score"},
      {"f1score", "f1_score"},
      {"f_1_score", "f1_score"},
      {"f1_measure", "f1_score"},
      {"macro_f1", "f1_score"},
      {"confusion", "confusion_matrix"},
      {"mean_squared_error", "mse"},
      {"mean_absolute_error", "mae"},
      {"root_mean_squared_error", "rmse"},
      {"r_squared", "r2"},
      {"r2_score", "r2"},
      {"r^2", "r2"},
      {"silhouette_score", "silhouette"},
      {"precision_score", "precision"},
      {"recall_score", "recall"},
      {"accuracy_score", "accuracy"},
  };
  const std::string k = util::normalize_name(name);
  const auto& all = canonical_metrics();
  if (std::find(all.begin(), all.end(), k) != all.end()) return k;
  if (auto it = syn.find(k); it != syn.end()) return it->second;
  throw UnknownMetric(std::string(name));
}

bool is_error_metric(std::string_view metric) { return metric == "mse" || metric == "mae" || metric == "rmse"; }

const std::vector<std::string>& known_methods(MlTask task) {
  static const std::map<MlTask, std::vector<std::string>> m = {
      {MlTask::classification,
       {"logistic_regression", "decision_tree_classifier", "random_forest_classifier", "svm_classifier",
        "knn_classifier", "xgboost_classifier", "naive_bayes", "gradient_boosting_classifier"}},
      {MlTask::regression,
       {"linear_regression", "ridge_regression", "lasso_regression", "decision_tree_regressor",
        "random_forest_regressor", "svm_regressor", "knn_regressor", "xgboost_regressor",
        "gradient_boosting_regressor"}},
      {MlTask::clustering, {"kmeans", "dbscan", "agglomerative"}},
      {MlTask::dimensionality_reduction, {"pca", "truncated_svd", "fast_ica", "tsne"}},
      {MlTask::anomaly_detection, {"isolation_forest", "one_class_svm", "local_outlier_factor"}},
      {MlTask::time_series, {"arima", "sarima", "exponential_smoothing", "prophet", "linear_regression"}},
  };
  return m.at(task);
}

std::string canonical_method(std::string_view name, MlTask task) {
  std::string k = util::normalize_name(name);
  const auto& known = known_methods(task);
  auto has = [&](const std::string& s) { return std::find(known.begin(), known.end(), s) != known.end(); };
  if (has(k)) return k;
  static const std::map<std::string, std::string> syn = {
      {"logistic", "logistic_regression"},
      {"logreg", "logistic_regression"},
      {"support_vector_machine", "svm"},
      {"support_vector_classifier", "svm_classifier"},
      {"svc", "svm_classifier"},
      {"svr", "svm_regressor"},
      {"k_nearest_neighbors", "knn"},
      {"k_nearest_neighbours", "knn"},
      {"nearest_neighbors", "knn"},
      {"gaussian_naive_bayes", "naive_bayes"},
      {"naive_bayes_classifier", "naive_bayes"},
      {"nb", "naive_bayes"},
      {"k_means", "kmeans"},
      {"hierarchical", "agglomerative"},
      {"agglomerative_clustering", "agglomerative"},
      {"hierarchical_clustering", "agglomerative"},
      {"ica", "fast_ica"},
      {"t_sne", "tsne"},
      {"lof", "local_outlier_factor"},
      {"ridge", "ridge_regression"},
      {"lasso", "lasso_regression"},
      {"gbm", "gradient_boosting"},
  };
  if (auto it = syn.find(k); it != syn.end()) k = it->second;
  if (has(k)) return k;
  const std::string suffix = task == MlTask::classification ? "_classifier" : task == MlTask::regression ? "_regressor" : "";
  if (!suffix.empty()) {
    std::string stem = k;
    for (const char* strip : {"_classifier", "_classification", "_regressor", "_regression", "_model"}) {
      const std::string s = strip;
      if (stem.size() > s.size() && stem.compare(stem.size() - s.size(), s.size(), s) == 0) {
        stem = stem.substr(0, stem.size() - s.size());
        break;
      }
    }
    if (has(stem + suffix)) return stem + suffix;
    if (has(stem)) return stem;
  }
  throw UnknownMethod(std::string(name), task);
}

Validation parse_validation(std::string_view text) {
  const std::string k = util::normalize_name(text);
  static const std::regex folds_re(R"((\d+)_?(fold|folds))");
  std::smatch m;
  Validation v;
  if (k.find("holdout") != std::string::npos || k.find("hold_out") != std::string::npos ||
      k.find("train_test") != std::string::npos || k.find("split") != std::string::npos) {
    v.kind = "holdout";
    v.folds = 0;
    static const std::regex pct(R"((\d+)_?(?:/|_)_?(\d+))");
    if (std::regex_search(k, m, pct)) {
      const double a = std::stod(m[1].str()), b = std::stod(m[2].str());
      if (a + b == 100 && b > 0 && a > 0) v.split = b / 100.0;
    }
    return v;
  }
  if (k.find("cross") != std::string::npos || k.find("fold") != std::string::npos || k == "cv" ||
      k.find("kfold") != std::string::npos) {
    v.kind = "cross_validation";
    if (std::regex_search(k, m, folds_re)) v.folds = std::stoi(m[1].str());
    if (v.folds < 2) throw ValidationError("UnknownValidation", "cross-validation needs at least 2 folds");
    return v;
  }
  throw ValidationError("UnknownValidation", "unknown validation method: " + std::string(text));
}

Json TrainRequest::to_wire() const {
  Json val = {{"kind", validation.kind}};
  if (validation.kind == "holdout") {
    val["split"] = validation.split;
  } else {
    val["folds"] = validation.folds;
  }
  Json data = {{"x", x}, {"y", y}};
  if (!labels.empty()) data["labels"] = labels;
  return {{"request_id", request_id}, {"task", std::string(petel::to_string(task))},
          {"methods", methods},       {"metrics", metrics},
          {"validation", val},        {"columns", columns},
          {"data", data},             {"advisory", advisory}};
}

TrainRequest TrainRequest::from_wire(const Json& body) {
  if (!body.is_object()) throw ProtocolError("request must be an object");
  TrainRequest r;
  try {
    r.request_id = body.at("request_id").get<std::string>();
    r.task = task_from_wire(body.at("task"));
    r.methods = string_list(body.at("methods"), "methods");
    r.metrics = string_list(body.at("metrics"), "metrics");
    const Json& v = body.at("validation");
    r.validation.kind = v.at("kind").get<std::string>();
    if (r.validation.kind == "holdout") {
      r.validation.folds = 0;
      r.validation.split = v.value("split", 0.2);
    } else if (r.validation.kind == "cross_validation") {
      r.validation.folds = v.at("folds").get<int>();
    } else {
      throw ProtocolError("unknown validation kind " + r.validation.kind);
    }
    r.columns = string_list(body.at("columns"), "columns");
    const Json& data = body.at("data");
    r.x = data.at("x").get<std::vector<std::vector<double>>>();
    r.y = data.at("y").get<std::vector<double>>();
    if (data.contains("labels")) r.labels = string_list(data["labels"], "labels");
    if (body.contains("advisory")) r.advisory = body["advisory"];
  } catch (const Json::exception& e) {
    throw ProtocolError(std::string("malformed request: ") + e.what());
  }
  if (r.methods.empty()) throw ProtocolError("methods is empty");
  if (r.metrics.empty()) throw ProtocolError("metrics is empty");
  for (const auto& row : r.x) {
    if (row.size() != r.columns.size()) throw ProtocolError("x row width does not match columns");
  }
  if (!r.y.empty() && r.y.size() != r.x.size()) throw ProtocolError("y length does not match x");
  return r;
}

TrainRequest build_train_request(const petel::Petel& petel, const PreparedMatrix& matrix, std::uint64_t seed) {
  TrainRequest r;
  r.task = petel.problem_type();
  for (const auto& m : petel.list_text(petel.schema().methods_slot())) {
    const std::string c = canonical_method(m, r.task);
    if (std::find(r.methods.begin(), r.methods.end(), c) == r.methods.end()) r.methods.push_back(c);
  }
  for (const auto& m : petel.list_text("performance_metrics")) {
    const std::string c = canonical_metric(m);
    if (std::find(r.metrics.begin(), r.metrics.end(), c) == r.metrics.end()) r.metrics.push_back(c);
  }
  if (r.methods.empty()) throw ValidationError("NoMethods", "the PeTEL lists no methods");
  if (r.metrics.empty()) throw ValidationError("NoMetrics", "the PeTEL lists no metrics");
  r.validation = parse_validation(petel.scalar_text("validation_method").value_or("cross_validation"));

  // dataset_size: integer n, "n/Default" (n when that many rows exist) or Default.
  std::size_t n = matrix.x.size();
  const Json& size = petel.get("dataset_size");
  if (size.is_number_integer()) {
    n = std::min<std::size_t>(n, static_cast<std::size_t>(size.get<long long>()));
  } else if (size.is_string()) {
    const std::string s = size.get<std::string>();
    if (const auto slash = s.find('/'); slash != std::string::npos) {
      n = std::min<std::size_t>(n, std::stoull(s.substr(0, slash)));
    }
  }
  std::vector<std::size_t> keep(matrix.x.size());
  for (std::size_t i = 0; i < keep.size(); ++i) keep[i] = i;
  if (n < matrix.x.size()) {
    std::mt19937_64 rng(seed);
    std::shuffle(keep.begin(), keep.end(), rng);
    keep.resize(n);
    std::sort(keep.begin(), keep.end());
    r.notes.push_back("subsampled " + std::to_string(n) + " of " + std::to_string(matrix.x.size()) + " rows");
  }
  r.columns = matrix.columns;
  r.labels = matrix.labels;
  for (std::size_t i : keep) {
    r.x.push_back(matrix.x[i]);
    if (!matrix.y.empty()) r.y.push_back(matrix.y[i]);
    r.row_index.push_back(matrix.row_index[i]);
  }
  if (r.validation.kind == "cross_validation" && static_cast<std::size_t>(r.validation.folds) > r.x.size()) {
    r.validation.folds = static_cast<int>(std::max<std::size_t>(2, r.x.size()));
    r.notes.push_back("fold count reduced to " + std::to_string(r.validation.folds) + " to fit the row count");
  }
  for (const char* slot : {"additional_requirements", "business_goals"}) {
    auto v = petel.list_text(slot);
    if (!v.empty()) r.advisory[slot] = v;
  }
  if (auto p = petel.scalar_text("model_preferences")) r.advisory["model_preferences"] = *p;
  for (const auto& note : matrix.notes) r.notes.push_back(note);

  Json id_src = r.to_wire();
  id_src.erase("request_id");
  r.request_id = "req-" + hex(fnv1a(id_src.dump() + "#" + std::to_string(seed)));
  return r;
}

const MethodOutcome* TrainResponse::find(std::string_view method) const {
  for (const auto& m : per_method) {
    if (m.method == method) return &m;
  }
  return nullptr;
}

Json TrainResponse::to_wire() const {
  Json per = Json::object();
  Json wall = Json::object();
  for (const auto& m : per_method) {
    per[m.method] = {{"status", m.status}, {"metrics", m.metrics}, {"message", m.message}};
    wall[m.method] = m.wall_time_s;
  }
  return {{"request_id", request_id}, {"per_method", per}, {"wall_time_s", wall}};
}

TrainResponse parse_train_response(const TrainRequest& request, const Json& body) {
  if (!body.is_object()) throw ProtocolError("response must be an object");
  if (!body.contains("request_id") || body["request_id"] != Json(request.request_id)) {
    throw ProtocolError("response request_id does not match");
  }
  if (!body.contains("per_method") || !body["per_method"].is_object()) throw ProtocolError("per_method missing");
  const Json& per = body["per_method"];
  const Json wall = body.contains("wall_time_s") && body["wall_time_s"].is_object() ? body["wall_time_s"] : Json::object();
  TrainResponse r;
  r.request_id = request.request_id;
  auto read = [&](const std::string& name, const Json& v) {
    if (!v.is_object()) throw ProtocolError("per_method." + name + " must be an object");
    MethodOutcome o;
    o.method = name;
    o.status = v.value("status", "");
    if (o.status != "ok" && o.status != "failed") throw ProtocolError("per_method." + name + " has status " + o.status);
    o.metrics = v.contains("metrics") && !v["metrics"].is_null() ? v["metrics"] : Json::object();
    if (!o.metrics.is_object()) throw ProtocolError("per_method." + name + ".metrics must be an object");
    for (auto it = o.metrics.begin(); it != o.metrics.end(); ++it) {
      if (!it.value().is_number() && !it.value().is_array()) {
        throw ProtocolError("metric " + it.key() + " of " + name + " is neither a number nor a matrix");
      }
    }
    if (v.contains("message") && v["message"].is_string()) o.message = v["message"].get<std::string>();
    if (wall.contains(name) && wall[name].is_number()) o.wall_time_s = wall[name].get<double>();
    return o;
  };
  for (const auto& m : request.methods) {
    if (!per.contains(m)) throw ProtocolError("no result for requested method " + m);
    r.per_method.push_back(read(m, per[m]));
  }
  for (auto it = per.begin(); it != per.end(); ++it) {
    if (std::find(request.methods.begin(), request.methods.end(), it.key()) == request.methods.end()) {
      r.per_method.push_back(read(it.key(), it.value()));
    }
  }
  return r;
}

Json classification_metrics(const std::vector<double>& y, const std::vector<double>& pred, std::size_t classes,
                            const std::vector<std::string>& wanted) {
  std::vector<std::vector<long long>> cm(classes, std::vector<long long>(classes, 0));
  for (std::size_t i = 0; i < y.size(); ++i) ++cm[static_cast<std::size_t>(y[i])][static_cast<std::size_t>(pred[i])];
  double correct = 0, p_sum = 0, r_sum = 0, f_sum = 0;
  std::size_t present = 0;
  for (std::size_t c = 0; c < classes; ++c) {
    correct += static_cast<double>(cm[c][c]);
    double row = 0, col = 0;
    for (std::size_t k = 0; k < classes; ++k) {
      row += static_cast<double>(cm[c][k]);
      col += static_cast<double>(cm[k][c]);
    }
    if (row == 0) continue;  // macro average over classes present in y
    ++present;
    const double p = col > 0 ? cm[c][c] / col : 0.0;
    const double r = cm[c][c] / row;
    p_sum += p;
    r_sum += r;
    f_sum += p + r > 0 ? 2 * p * r / (p + r) : 0.0;
  }
  Json out = Json::object();
  const double n = static_cast<double>(y.size());
  for (const auto& m : wanted) {
    if (m == "accuracy") out[m] = n > 0 ? correct / n : 0.0;
    if (m == "precision") out[m] = present ? p_sum / present : 0.0;
    if (m == "recall") out[m] = present ? r_sum / present : 0.0;
    if (m == "f1_score") out[m] = present ? f_sum / present : 0.0;
    if (m == "confusion_matrix") out[m] = cm;
  }
  return out;
}

Json regression_metrics(const std::vector<double>& y, const std::vector<double>& pred,
                        const std::vector<std::string>& wanted) {
  const double n = static_cast<double>(y.size());
  double se = 0, ae = 0, mean = 0;
  for (double v : y) mean += v / n;
  double ss_tot = 0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    se += (y[i] - pred[i]) * (y[i] - pred[i]);
    ae += std::fabs(y[i] - pred[i]);
    ss_tot += (y[i] - mean) * (y[i] - mean);
  }
  Json out = Json::object();
  for (const auto& m : wanted) {
    if (m == "mse") out[m] = se / n;
    if (m == "rmse") out[m] = std::sqrt(se / n);
    if (m == "mae") out[m] = ae / n;
    if (m == "r2") out[m] = ss_tot > 0 ? 1.0 - se / ss_tot : 0.0;
  }
  return out;
}

Capabilities BuiltinBaselineBackend::capabilities() {
  return {{"majority_class_baseline", "mean_baseline"}, canonical_metrics()};
}

Json BuiltinBaselineBackend::train(const Json& body, std::chrono::milliseconds) {
  const TrainRequest req = TrainRequest::from_wire(body);
  TrainResponse resp;
  resp.request_id = req.request_id;
  for (const auto& m : req.methods) {
    resp.per_method.push_back({m, "failed", Json::object(), "not available in the builtin baseline backend", 0});
  }
  if (req.task == MlTask::classification && !req.y.empty()) {
    std::size_t classes = req.labels.empty() ? 0 : req.labels.size();
    for (double v : req.y) classes = std::max(classes, static_cast<std::size_t>(v) + 1);
    std::vector<std::size_t> counts(classes, 0);
    for (double v : req.y) ++counts[static_cast<std::size_t>(v)];
    // lowest index wins ties, so the result does not depend on row order
    const auto best = static_cast<double>(std::max_element(counts.begin(), counts.end()) - counts.begin());
    const std::vector<double> pred(req.y.size(), best);
    std::string label = req.labels.empty() ? util::format_number(best) : req.labels[static_cast<std::size_t>(best)];
    resp.per_method.push_back({"majority_class_baseline", "ok", classification_metrics(req.y, pred, classes, req.metrics),
                               "predicts " + label + " for every row; scored on the training rows", 0});
  } else if ((req.task == MlTask::regression || req.task == MlTask::time_series) && !req.y.empty()) {
    double mean = 0;
    for (double v : req.y) mean += v / static_cast<double>(req.y.size());
    const std::vector<double> pred(req.y.size(), mean);
    resp.per_method.push_back({"mean_baseline", "ok", regression_metrics(req.y, pred, req.metrics),
                               "predicts the mean " + util::format_number(mean) + "; scored on the training rows", 0});
  }
  return resp.to_wire();
}

HttpBackend::HttpBackend(std::string base_url) : base_url_(std::move(base_url)) {
  while (!base_url_.empty() && base_url_.back() == '/') base_url_.pop_back();
}

namespace {

[[noreturn]] void raise_transport(httplib::Error err, const std::string& where) {
  const std::string what = where + ": " + httplib::to_string(err);
  if (err == httplib::Error::ConnectionTimeout || err == httplib::Error::Read) throw BackendTimeout(what);
  throw BackendUnreachable(what);
}

Json parse_body(const httplib::Result& res, const std::string& where) {
  if (res->status < 200 || res->status >= 300) {
    throw ProtocolError(where + " returned HTTP " + std::to_string(res->status) + ": " + res->body.substr(0, 200));
  }
  Json j = Json::parse(res->body, nullptr, false);
  if (j.is_discarded()) throw ProtocolError(where + " returned a body that is not JSON");
  return j;
}

void split_url(const std::string& url, std::string& origin, std::string& prefix) {
  const auto scheme = url.find("://");
  const auto path = url.find('/', scheme == std::string::npos ? 0 : scheme + 3);
  origin = path == std::string::npos ? url : url.substr(0, path);
  prefix = path == std::string::npos ? "" : url.substr(path);
}

}  // namespace

Capabilities HttpBackend::capabilities() {
  std::string origin, prefix;
  split_url(base_url_, origin, prefix);
  httplib::Client cli(origin);
  cli.set_connection_timeout(std::chrono::seconds(5));
  cli.set_read_timeout(std::chrono::seconds(30));
  auto res = cli.Get(prefix + "/v1/capabilities");
  if (!res) raise_transport(res.error(), "GET /v1/capabilities");
  const Json j = parse_body(res, "GET /v1/capabilities");
  if (!j.is_object() || !j.contains("methods") || !j.contains("metrics")) {
    throw ProtocolError("capabilities must have methods and metrics");
  }
  return {string_list(j["methods"], "methods"), string_list(j["metrics"], "metrics")};
}

Json HttpBackend::train(const Json& request, std::chrono::milliseconds timeout) {
  std::string origin, prefix;
  split_url(base_url_, origin, prefix);
  httplib::Client cli(origin);
  cli.set_connection_timeout(std::min<std::chrono::milliseconds>(timeout, std::chrono::seconds(10)));
  cli.set_read_timeout(timeout);
  cli.set_write_timeout(timeout);
  auto res = cli.Post(prefix + "/v1/train", request.dump(), "application/json");
  if (!res) raise_transport(res.error(), "POST /v1/train");
  return parse_body(res, "POST /v1/train");
}

std::unique_ptr<Backend> make_backend(const std::string& spec) {
  if (spec.empty() || spec == "builtin") return std::make_unique<BuiltinBaselineBackend>();
  if (util::starts_with(spec, "http://") || util::starts_with(spec, "https://")) {
    return std::make_unique<HttpBackend>(spec);
  }
  throw ValidationError("UnknownBackend", "backend must be builtin or an http URL: " + spec);
}

TrainResponse dispatch(const TrainRequest& request, Backend& backend, std::chrono::milliseconds timeout) {
  if (timeout.count() <= 0) throw ValidationError("InvalidTimeout", "timeout must be positive");
  const Capabilities caps = backend.capabilities();
  auto offered = [&](const std::string& m) { return std::find(caps.methods.begin(), caps.methods.end(), m) != caps.methods.end(); };
  const bool builtin = dynamic_cast<BuiltinBaselineBackend*>(&backend) != nullptr;

  TrainRequest sent = request;
  sent.methods.clear();
  std::map<std::string, std::string> alias;  // sent name -> requested name
  std::vector<MethodOutcome> unsupported;
  for (const auto& m : request.methods) {
    if (builtin || offered(m)) {
      sent.methods.push_back(m);
      continue;
    }
    if (util::starts_with(m, "xgboost_")) {
      const std::string gb = "gradient_boosting_" + m.substr(8);
      if (offered(gb)) {
        sent.methods.push_back(gb);
        alias[gb] = m;
        continue;
      }
    }
    unsupported.push_back({m, "failed", Json::object(), "not offered by backend " + backend.id(), 0});
  }

  TrainResponse out;
  out.request_id = request.request_id;
  if (!sent.methods.empty()) {
    const TrainResponse got = parse_train_response(sent, backend.train(sent.to_wire(), timeout));
    for (auto o : got.per_method) {
      if (auto it = alias.find(o.method); it != alias.end()) {
        o.message = "ran as " + o.method + (o.message.empty() ? "" : "; " + o.message);
        o.method = it->second;
      }
      out.per_method.push_back(std::move(o));
    }
  }
  for (auto& u : unsupported) out.per_method.push_back(std::move(u));
  // requested order first, extras after
  std::stable_sort(out.per_method.begin(), out.per_method.end(), [&](const MethodOutcome& a, const MethodOutcome& b) {
    auto pos = [&](const std::string& m) {
      auto it = std::find(request.methods.begin(), request.methods.end(), m);
      return static_cast<std::size_t>(it - request.methods.begin());
    };
    return pos(a.method) < pos(b.method);
  });
  return out;
}

}  // namespace dschat::engineering
