#include "dschat/petel/ml_task.hpp"

#include "dschat/util/text.hpp"

namespace dschat::petel {

std::string_view to_string(MlTask task) {
  switch (task) {
    case MlTask::classification: return "classification";
    case MlTask::regression: return "regression";
    case MlTask::clustering: return "clustering";
    case MlTask::dimensionality_reduction: return "dimensionality_reduction";
    case MlTask::anomaly_detection: return "anomaly_detection";
    case MlTask::time_series: return "time_series";
  }
  return "unknown";
}

std::string display_name(MlTask task) { return util::replace_all(std::string(to_string(task)), "_", " "); }

std::optional<MlTask> parse_task(std::string_view name) {
  std::string n = util::normalize_name(name);
  for (std::string_view suffix : {"_model", "_task", "_problem"}) {
    if (n.size() > suffix.size() && n.compare(n.size() - suffix.size(), suffix.size(), suffix) == 0) {
      n.resize(n.size() - suffix.size());
    }
  }
  for (MlTask t : kAllTasks) {
    if (n == to_string(t)) return t;
  }
  if (n == "time_series_forecasting" || n == "timeseries" || n == "time_series_forecast" || n == "forecasting") {
    return MlTask::time_series;
  }
  if (n == "dimension_reduction") return MlTask::dimensionality_reduction;
  if (n == "outlier_detection") return MlTask::anomaly_detection;
  return std::nullopt;
}

}  // namespace dschat::petel
