#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>

namespace dschat::petel {

enum class MlTask {
  classification,
  regression,
  clustering,
  dimensionality_reduction,
  anomaly_detection,
  time_series,
};

inline constexpr std::array<MlTask, 6> kAllTasks = {
    MlTask::classification,   MlTask::regression,        MlTask::clustering,
    MlTask::dimensionality_reduction, MlTask::anomaly_detection, MlTask::time_series,
};

// "time_series", "dimensionality_reduction", ...
std::string_view to_string(MlTask task);
// "time series", "dimensionality reduction", ...
std::string display_name(MlTask task);

// Case- and separator-insensitive; accepts "time_series_forecasting", "Dimensionality Reduction",
// and a trailing " model" / " task".
std::optional<MlTask> parse_task(std::string_view name);

}  // namespace dschat::petel
