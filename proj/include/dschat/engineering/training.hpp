#pragma once

#include <chrono>
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "dschat/engineering/engineering.hpp"

namespace dschat::engineering {

class UnknownMetric : public ValidationError {
 public:
  explicit UnknownMetric(const std::string& name) : ValidationError("UnknownMetric", "unknown metric: " + name) {}
};

class UnknownMethod : public ValidationError {
 public:
  UnknownMethod(const std::string& name, petel::MlTask task)
      : ValidationError("UnknownMethod",
                        "unknown " + petel::display_name(task) + " method: " + name) {}
};

class BackendUnreachable : public UpstreamError {
 public:
  explicit BackendUnreachable(const std::string& what) : UpstreamError("BackendUnreachable", what) {}
};

class ProtocolError : public UpstreamError {
 public:
  explicit ProtocolError(const std::string& detail) : UpstreamError("ProtocolError", "training backend: " + detail) {}
};

class BackendTimeout : public UpstreamError {
 public:
  explicit BackendTimeout(const std::string& what) : UpstreamError("Timeout", what) {}
};

// accuracy, precision, recall, f1_score, confusion_matrix, mse, mae, r2, rmse, silhouette
const std::vector<std::string>& canonical_metrics();
// Throws UnknownMetric.
std::string canonical_metric(std::string_view name);
// Lower is better.
bool is_error_metric(std::string_view metric);

const std::vector<std::string>& known_methods(petel::MlTask task);
// "random forest" -> random_forest_classifier for classification; throws UnknownMethod.
std::string canonical_method(std::string_view name, petel::MlTask task);

struct Validation {
  std::string kind = "cross_validation";  // or holdout
  int folds = 5;
  double split = 0.2;  // holdout test fraction
  bool operator==(const Validation&) const = default;
};

// "cross_validation", "k-fold", "10-fold cross validation", "holdout", "train_test_split", ...
Validation parse_validation(std::string_view text);

struct TrainRequest {
  std::string request_id;
  petel::MlTask task = petel::MlTask::classification;
  std::vector<std::string> methods;
  std::vector<std::string> metrics;
  Validation validation;
  std::vector<std::string> columns;
  std::vector<std::vector<double>> x;
  std::vector<double> y;
  std::vector<std::string> labels;
  std::vector<std::size_t> row_index;
  Json advisory = Json::object();  // requirement strings the backend may honour
  std::vector<std::string> notes;

  Json to_wire() const;
  static TrainRequest from_wire(const Json& body);
};

// Copies methods and metrics from the PeTEL, fixes validation, subsamples to dataset_size with `seed`.
TrainRequest build_train_request(const petel::Petel& petel, const PreparedMatrix& matrix, std::uint64_t seed = 0);

struct MethodOutcome {
  std::string method;
  std::string status;  // ok or failed
  Json metrics = Json::object();
  std::string message;
  double wall_time_s = 0;
  bool operator==(const MethodOutcome&) const = default;
};

struct TrainResponse {
  std::string request_id;
  std::vector<MethodOutcome> per_method;  // requested methods first, in request order

  const MethodOutcome* find(std::string_view method) const;
  Json to_wire() const;
};

// Checks a wire response against its request: same request_id, every requested method answered
// once with a valid status. Extra methods are kept after the requested ones. Throws ProtocolError.
TrainResponse parse_train_response(const TrainRequest& request, const Json& body);

struct Capabilities {
  std::vector<std::string> methods;
  std::vector<std::string> metrics;
};

class Backend {
 public:
  virtual ~Backend() = default;
  virtual Capabilities capabilities() = 0;
  // Wire request in, wire response out.
  virtual Json train(const Json& request, std::chrono::milliseconds timeout) = 0;
  virtual std::string id() const = 0;
};

// Answers every request locally. Requested methods are reported as failed; a majority-class
// (classification) or mean (regression) baseline is scored by resubstitution.
class BuiltinBaselineBackend : public Backend {
 public:
  Capabilities capabilities() override;
  Json train(const Json& request, std::chrono::milliseconds timeout) override;
  std::string id() const override { return "builtin"; }
};

class HttpBackend : public Backend {
 public:
  explicit HttpBackend(std::string base_url);
  Capabilities capabilities() override;
  Json train(const Json& request, std::chrono::milliseconds timeout) override;
  std::string id() const override { return base_url_; }

 private:
  std::string base_url_;
};

// "builtin" or an http(s) URL.
std::unique_ptr<Backend> make_backend(const std::string& spec);

// Sends the request, substituting gradient boosting for xgboost methods the backend lacks and
// reporting unsupported methods as failed in-band.
TrainResponse dispatch(const TrainRequest& request, Backend& backend,
                       std::chrono::milliseconds timeout = std::chrono::minutes(10));

// classification metrics on encoded labels
Json classification_metrics(const std::vector<double>& y, const std::vector<double>& pred, std::size_t classes,
                            const std::vector<std::string>& wanted);
Json regression_metrics(const std::vector<double>& y, const std::vector<double>& pred,
                        const std::vector<std::string>& wanted);

}  // namespace dschat::engineering
