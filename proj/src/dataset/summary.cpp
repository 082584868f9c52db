#include "dschat/dataset/summary.hpp"

#include <algorithm>
#include <regex>

#include "dschat/gateway/json_extract.hpp"
#include "dschat/util/text.hpp"

namespace dschat::dataset {

using gateway::AgentId;

namespace {

const std::vector<std::string> kParts = {"summary", "columns", "row", "trend"};

std::string part_for_key(const std::string& key) {
  const std::string k = util::normalize_name(key);
  if (k == "summary" || k == "dataset_summary") return "summary";
  if (k == "columns" || k == "column" || k == "column_descriptions") return "columns";
  if (k == "row" || k == "sample_row" || k == "random_row" || k == "rows") return "row";
  if (k == "trend" || k == "trends") return "trend";
  return "";
}

std::string as_text(const Json& v) {
  if (v.is_string()) return util::trim(v.get<std::string>());
  if (v.is_null()) return "";
  return v.dump();
}

std::vector<ColumnDescription> as_columns(const Json& v) {
  std::vector<ColumnDescription> out;
  if (v.is_array()) {
    for (const auto& item : v) {
      if (item.is_object()) {
        std::string name = item.contains("name") ? as_text(item["name"]) : item.contains("column") ? as_text(item["column"]) : "";
        std::string desc = item.contains("description") ? as_text(item["description"]) : "";
        if (name.empty() && item.size() == 1) {
          name = item.begin().key();
          desc = as_text(item.begin().value());
        }
        if (!name.empty()) out.push_back({name, desc});
      } else if (item.is_string()) {
        const std::string s = item.get<std::string>();
        const auto colon = s.find(':');
        if (colon == std::string::npos) {
          out.push_back({util::trim(s), ""});
        } else {
          out.push_back({util::trim(s.substr(0, colon)), util::trim(s.substr(colon + 1))});
        }
      }
    }
  } else if (v.is_object()) {
    for (auto it = v.begin(); it != v.end(); ++it) out.push_back({it.key(), as_text(it.value())});
  } else if (v.is_string() && !util::trim(v.get<std::string>()).empty()) {
    // Prose in place of a list, as in some replies; kept as a single entry.
    out.push_back({"", util::trim(v.get<std::string>())});
  }
  return out;
}

}  // namespace

SchemaViolation::SchemaViolation(std::vector<std::string> missing)
    : ValidationError("SchemaViolation", "summary is missing: " + util::join(missing, ", ")),
      missing_(std::move(missing)) {}

Json DatasetSummary::to_json() const {
  Json cols = Json::array();
  for (const auto& c : columns) cols.push_back({{"name", c.name}, {"description", c.description}});
  return {{"summary", summary}, {"columns", cols}, {"row", row}, {"trend", trend}};
}

DatasetSummary DatasetSummary::from_json(const Json& j) {
  std::vector<std::string> missing;
  DatasetSummary s = parse_dataset_summary(j, missing);
  if (!missing.empty()) throw SchemaViolation(missing);
  return s;
}

std::string DatasetSummary::render() const {
  std::string out = summary + "\nColumns:";
  for (const auto& c : columns) {
    out += "\n- " + (c.name.empty() ? c.description : c.name + (c.description.empty() ? "" : ": " + c.description));
  }
  out += "\nRow: " + row + "\nTrend: " + trend;
  return out;
}

DatasetSummary parse_dataset_summary(const Json& reply, std::vector<std::string>& missing) {
  DatasetSummary s;
  missing.clear();
  std::vector<bool> seen(kParts.size(), false);
  if (reply.is_object()) {
    for (auto it = reply.begin(); it != reply.end(); ++it) {
      const std::string part = part_for_key(it.key());
      if (part == "summary") {
        s.summary = as_text(it.value());
        seen[0] = !s.summary.empty();
      } else if (part == "columns") {
        s.columns = as_columns(it.value());
        seen[1] = !s.columns.empty();
      } else if (part == "row") {
        s.row = as_text(it.value());
        seen[2] = !s.row.empty();
      } else if (part == "trend") {
        s.trend = as_text(it.value());
        seen[3] = !s.trend.empty();
      }
    }
  }
  for (std::size_t i = 0; i < kParts.size(); ++i) {
    if (!seen[i]) missing.push_back(kParts[i]);
  }
  return s;
}

DatasetSummary summarize_dataset(const MiniDataset& mini, const gateway::Gateway& gw, const Dataset* dataset) {
  const gateway::Bindings bind = {{"dataset", mini.rendered}};
  std::vector<std::string> missing;
  DatasetSummary s;
  for (int attempt = 0; attempt < 2; ++attempt) {
    std::string suffix;
    if (attempt == 1) {
      suffix = " The previous reply was missing: " + util::join(missing, ", ") +
               ". Reply with one JSON object with the keys summary, columns, row and trend.";
    }
    const auto resp = gw.call(AgentId::dataset_summarizer, bind, suffix);
    Json parsed;
    try {
      parsed = gateway::extract_object(resp.raw_text);
    } catch (const ValidationError&) {
      parsed = Json();
    }
    s = parse_dataset_summary(parsed, missing);
    if (missing.empty()) break;
  }
  if (!missing.empty()) throw SchemaViolation(missing);

  if (dataset) {
    std::vector<std::string> known;
    for (const auto& c : dataset->columns) known.push_back(util::normalize_name(c.name));
    for (const auto& c : s.columns) {
      if (c.name.empty()) continue;
      if (std::find(known.begin(), known.end(), util::normalize_name(c.name)) == known.end()) {
        s.warnings.push_back("UnknownColumn(" + c.name + ")");
      }
    }
  }
  return s;
}

// ---- task suggestions ----

namespace {

struct TaskPattern {
  petel::MlTask task;
  std::vector<std::string> spellings;
};

const std::vector<TaskPattern>& task_patterns() {
  static const std::vector<TaskPattern> p = {
      {petel::MlTask::classification, {"classification"}},
      {petel::MlTask::regression, {"regression"}},
      {petel::MlTask::clustering, {"clustering"}},
      {petel::MlTask::dimensionality_reduction, {"dimensionality reduction", "dimensionality_reduction", "dimensionality-reduction"}},
      {petel::MlTask::anomaly_detection, {"anomaly detection", "anomaly_detection", "anomaly-detection"}},
      {petel::MlTask::time_series, {"time series", "time_series", "time-series"}},
  };
  return p;
}

// First mention of the task in the paragraph, or npos. "logistic regression" is a
// classifier name, not a regression task.
std::size_t mention(const std::string& para, const TaskPattern& p) {
  std::size_t best = std::string::npos;
  for (const auto& sp : p.spellings) {
    for (std::size_t pos = util::find_word_ci(para, sp); pos != std::string::npos;
         pos = util::find_word_ci(para, sp, pos + 1)) {
      if (p.task == petel::MlTask::regression && pos >= 9 && util::to_lower(para.substr(pos - 9, 9)) == "logistic ") {
        continue;
      }
      best = std::min(best, pos);
      break;
    }
  }
  return best;
}

std::vector<std::string> paragraphs(const std::string& text) {
  static const std::regex list_item(R"(^\s*(\d+[.)]|[-*])\s+)");
  std::vector<std::string> out;
  std::string cur;
  auto flush = [&] {
    const std::string t = util::trim(cur);
    if (!t.empty()) out.push_back(t);
    cur.clear();
  };
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string::npos) end = text.size();
    std::string line = text.substr(start, end - start);
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (util::trim(line).empty()) {
      flush();
    } else {
      if (std::regex_search(line, list_item)) flush();
      if (!cur.empty()) cur += ' ';
      cur += util::trim(line);
    }
    start = end + 1;
  }
  flush();
  return out;
}

// Removes a leading "1. Classification:" / "**Regression**:" style heading.
std::string strip_heading(const std::string& para, const TaskPattern& p) {
  static const std::regex marker(R"(^\s*(\d+[.)]|[-*])\s*)");
  std::string s = std::regex_replace(para, marker, "", std::regex_constants::format_first_only);
  std::string stripped = s;
  while (!stripped.empty() && (stripped.front() == '*' || stripped.front() == '#' || stripped.front() == ' ')) stripped.erase(0, 1);
  for (const auto& sp : p.spellings) {
    if (util::to_lower(stripped.substr(0, sp.size())) != sp) continue;
    std::string rest = stripped.substr(sp.size());
    std::size_t i = 0;
    while (i < rest.size() && (rest[i] == '*' || rest[i] == ' ')) ++i;
    for (const std::string_view tail : {std::string_view("task"), std::string_view("tasks")}) {
      if (util::to_lower(rest.substr(i, tail.size())) == tail && (i + tail.size() == rest.size() || rest[i + tail.size()] == ':')) {
        i += tail.size();
        break;
      }
    }
    if (i < rest.size() && (rest[i] == ':' || rest[i] == '-')) {
      ++i;
      while (i < rest.size() && (rest[i] == '*' || rest[i] == ' ')) ++i;
      return util::trim(rest.substr(i));
    }
    if (i == rest.size()) return "";
  }
  return s;
}

std::vector<std::string> sentences(const std::string& text) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (std::size_t i = 0; i < text.size(); ++i) {
    if ((text[i] == '.' || text[i] == '?' || text[i] == '!') && (i + 1 == text.size() || text[i + 1] == ' ')) {
      out.push_back(util::trim(text.substr(start, i + 1 - start)));
      start = i + 1;
    }
  }
  if (start < text.size() && !util::trim(text.substr(start)).empty()) out.push_back(util::trim(text.substr(start)));
  return out;
}

}  // namespace

TaskSuggestion parse_task_suggestion(const std::string& text) {
  TaskSuggestion out;
  out.raw_text = text;
  const auto paras = paragraphs(text);
  struct Found {
    std::size_t para, pos;
    const TaskPattern* pattern;
  };
  std::vector<Found> found;
  for (const auto& p : task_patterns()) {
    for (std::size_t i = 0; i < paras.size(); ++i) {
      const std::size_t pos = mention(paras[i], p);
      if (pos != std::string::npos) {
        found.push_back({i, pos, &p});
        break;
      }
    }
  }
  std::sort(found.begin(), found.end(), [](const Found& a, const Found& b) {
    return a.para != b.para ? a.para < b.para : a.pos < b.pos;
  });
  for (const auto& f : found) {
    std::string rationale = strip_heading(paras[f.para], *f.pattern);
    if (rationale.empty() && f.para + 1 < paras.size()) rationale = paras[f.para + 1];
    std::string example;
    for (const auto& s : sentences(rationale)) {
      const std::string l = util::to_lower(s);
      if (l.find("formulat") != std::string::npos || l.find("example") != std::string::npos ||
          l.find("target") != std::string::npos) {
        example = s;
        break;
      }
    }
    out.tasks.push_back({f.pattern->task, rationale, example});
  }
  return out;
}

Json TaskSuggestion::to_json() const {
  Json arr = Json::array();
  for (const auto& t : tasks) {
    arr.push_back({{"task", std::string(petel::to_string(t.task))},
                   {"rationale", t.rationale},
                   {"example_formulation", t.example_formulation}});
  }
  return {{"tasks", arr}, {"raw_text", raw_text}};
}

TaskSuggestion TaskSuggestion::from_json(const Json& j) {
  TaskSuggestion s;
  s.raw_text = j.value("raw_text", "");
  for (const auto& t : j.value("tasks", Json::array())) {
    auto task = petel::parse_task(t.value("task", ""));
    if (!task) throw ValidationError("InvalidTask", "unknown task in suggestion: " + t.value("task", ""));
    s.tasks.push_back({*task, t.value("rationale", ""), t.value("example_formulation", "")});
  }
  return s;
}

TaskSuggestion suggest_tasks(const DatasetSummary& summary, const gateway::Gateway& gw) {
  const gateway::Bindings bind = {{"summary", summary.render()}};
  TaskSuggestion s;
  for (int attempt = 0; attempt < 2; ++attempt) {
    std::string suffix;
    if (attempt == 1) {
      suffix = " Name at least two tasks from the list: classification, regression, clustering, "
               "dimensionality reduction, anomaly detection, time series, each with its rationale.";
    }
    s = parse_task_suggestion(gw.call(AgentId::task_suggestor, bind, suffix).raw_text);
    if (s.tasks.size() >= 2) return s;
  }
  throw TooFewTasks(s.tasks.size());
}

}  // namespace dschat::dataset
