#include "dschat/petel/petel.hpp"

#include <algorithm>
#include <cmath>
#include <regex>

#include "dschat/gateway/json_extract.hpp"
#include "dschat/util/text.hpp"

namespace dschat::petel {

namespace {

Slot req(std::string name, SlotKind kind, std::string desc) { return {std::move(name), kind, true, std::move(desc)}; }
Slot opt(std::string name, SlotKind kind, std::string desc) { return {std::move(name), kind, false, std::move(desc)}; }

std::vector<Slot> optional_tail() {
  return {
      opt("data_filters", SlotKind::filter_list, "conditions rows must satisfy, each a column, condition and value"),
      opt("business_goals", SlotKind::list, "the business outcomes the model should support"),
      opt("additional_requirements", SlotKind::list, "other constraints such as interpretability or robustness"),
      opt("model_preferences", SlotKind::scalar, "preferred model qualities, e.g. interpretable or higher accuracy"),
  };
}

SlotSchema supervised(MlTask task, const std::string& methods, const std::string& methods_desc) {
  SlotSchema s{task, {
                         req("target_variable", SlotKind::scalar, "the column the model should predict"),
                         req("features", SlotKind::list, "the columns used as model inputs"),
                         req("dataset_size", SlotKind::scalar, "how many rows to use, a number or Default for all rows"),
                         req("performance_metrics", SlotKind::list, "the metrics used to evaluate the models"),
                         req("validation_method", SlotKind::scalar, "how models are validated, e.g. cross_validation or holdout"),
                         req(methods, SlotKind::list, methods_desc),
                     }, {}};
  for (auto& o : optional_tail()) s.slots.push_back(std::move(o));
  return s;
}

SlotSchema unsupervised(MlTask task, const std::string& methods, const std::string& methods_desc) {
  SlotSchema s{task, {
                         req("features", SlotKind::list, "the columns used as model inputs"),
                         req("dataset_size", SlotKind::scalar, "how many rows to use, a number or Default for all rows"),
                         req("performance_metrics", SlotKind::list, "the metrics used to evaluate the models"),
                         req("validation_method", SlotKind::scalar, "how models are validated, e.g. holdout"),
                         req(methods, SlotKind::list, methods_desc),
                     }, {}};
  for (auto& o : optional_tail()) s.slots.push_back(std::move(o));
  return s;
}

SlotSchema time_series() {
  SlotSchema s{MlTask::time_series, {
                                        req("target_variable", SlotKind::scalar, "the quantity to forecast"),
                                        req("forecast_horizon", SlotKind::scalar, "how far ahead to forecast"),
                                        req("granularity", SlotKind::scalar, "the time step of the series, e.g. daily"),
                                        req("features", SlotKind::list, "the columns used as model inputs"),
                                        req("time_range", SlotKind::scalar, "the period of history to use"),
                                        req("performance_metrics", SlotKind::list, "the metrics used to evaluate the forecasts"),
                                        req("validation_method", SlotKind::scalar, "how forecasts are validated"),
                                        req("time_series_methods", SlotKind::list, "candidate forecasting methods"),
                                    }, {}};
  for (auto& o : optional_tail()) s.slots.push_back(std::move(o));
  return s;
}

bool is_scalar(const Json& v) { return v.is_string() || v.is_number() || v.is_boolean(); }

Json coerce_dataset_size(const Json& raw) {
  static const std::regex count(R"(^\s*(\d[\d,]*)\s*(rows|samples|records)?\s*$)", std::regex::icase);
  static const std::regex with_default(R"(^\s*(\d[\d,]*)\s*/\s*default\s*$)", std::regex::icase);
  if (raw.is_number()) {
    const double v = raw.get<double>();
    if (v >= 1 && std::floor(v) == v) return static_cast<long long>(v);
    throw TypeMismatch("dataset_size", "must be a positive integer or Default");
  }
  const std::string s = raw.get<std::string>();
  const std::string lower = util::to_lower(util::trim(s));
  if (lower == "default" || lower == "all" || lower == "full") return "Default";
  std::smatch m;
  if (std::regex_match(s, m, count)) {
    const std::string digits = util::replace_all(m[1].str(), ",", "");
    return std::stoll(digits);
  }
  if (std::regex_match(s, m, with_default)) return util::replace_all(m[1].str(), ",", "") + "/Default";
  throw TypeMismatch("dataset_size", "must be a positive integer or Default, got \"" + s + "\"");
}

Json coerce_filter(const Json& raw) {
  if (!raw.is_object()) throw TypeMismatch("data_filters", "entries must be objects");
  Json out = {{"column", nullptr}, {"condition", nullptr}, {"value", nullptr}};
  for (auto it = raw.begin(); it != raw.end(); ++it) {
    const std::string k = util::normalize_name(it.key());
    if (k == "column") {
      if (!it.value().is_null() && !is_scalar(it.value())) throw TypeMismatch("data_filters", "column must be a name");
      if (it.value().is_string() || it.value().is_null()) {
        out["column"] = it.value();
      } else {
        out["column"] = it.value().dump();
      }
    } else if (k == "condition") {
      if (it.value().is_null()) continue;
      if (!it.value().is_string()) throw TypeMismatch("data_filters", "condition must be text");
      auto c = parse_condition(it.value().get<std::string>());
      if (!c) throw TypeMismatch("data_filters", "unknown condition \"" + it.value().get<std::string>() + "\"");
      out["condition"] = std::string(to_string(*c));
    } else if (k == "value") {
      out["value"] = it.value();
    } else {
      throw TypeMismatch("data_filters", "unexpected key " + it.key());
    }
  }
  const Json& v = out["value"];
  const std::string cond = out["condition"].is_string() ? out["condition"].get<std::string>() : "";
  if (cond == "between") {
    if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number()) {
      throw TypeMismatch("data_filters", "between needs a [low, high] pair");
    }
    if (v[0].get<double>() > v[1].get<double>()) throw TypeMismatch("data_filters", "between needs low <= high");
  } else if (cond == "in") {
    if (is_scalar(v)) out["value"] = Json::array({v});
    for (const auto& x : out["value"]) {
      if (!is_scalar(x)) throw TypeMismatch("data_filters", "in needs a list of values");
    }
  } else if (!v.is_null() && !is_scalar(v)) {
    if (v.is_array() && v.size() == 1 && is_scalar(v[0])) {
      out["value"] = v[0];
    } else {
      throw TypeMismatch("data_filters", cond.empty() ? "value must be a scalar" : cond + " needs a single value");
    }
  }
  return out;
}

}  // namespace

const Slot* SlotSchema::find(std::string_view name) const {
  for (const auto& s : slots) {
    if (s.name == name) return &s;
  }
  return nullptr;
}

const std::string& SlotSchema::methods_slot() const {
  for (const auto& s : slots) {
    if (s.name.size() > 8 && s.name.compare(s.name.size() - 8, 8, "_methods") == 0) return s.name;
  }
  static const std::string none;
  return none;
}

static void set_ask_order(SlotSchema& s) {
  for (bool required : {true, false}) {
    for (const auto& slot : s.slots) {
      if (slot.required == required) s.ask_order.push_back(slot.name);
    }
  }
  auto size = std::find(s.ask_order.begin(), s.ask_order.end(), "dataset_size");
  if (s.has_target() && size != s.ask_order.end()) {
    s.ask_order.erase(size);
    s.ask_order.insert(s.ask_order.begin() + 1, "dataset_size");
  }
}

const SlotSchema& schema_for(MlTask task) {
  static const std::map<MlTask, SlotSchema> schemas = [] {
    std::map<MlTask, SlotSchema> m;
    m.emplace(MlTask::classification,
              supervised(MlTask::classification, "classification_methods", "candidate classification methods"));
    m.emplace(MlTask::regression, supervised(MlTask::regression, "regression_methods", "candidate regression methods"));
    m.emplace(MlTask::clustering, unsupervised(MlTask::clustering, "clustering_methods",
                                               "candidate clustering methods: kmeans, dbscan or agglomerative"));
    m.emplace(MlTask::dimensionality_reduction,
              unsupervised(MlTask::dimensionality_reduction, "dimensionality_reduction_methods",
                           "candidate reduction methods such as pca or truncated_svd"));
    m.emplace(MlTask::anomaly_detection,
              unsupervised(MlTask::anomaly_detection, "anomaly_detection_methods",
                           "candidate detectors such as isolation_forest or one_class_svm"));
    m.emplace(MlTask::time_series, time_series());
    for (auto& [t, schema] : m) set_ask_order(schema);
    return m;
  }();
  return schemas.at(task);
}

std::string_view to_string(Condition c) {
  switch (c) {
    case Condition::equals: return "equals";
    case Condition::not_equals: return "not_equals";
    case Condition::greater_than: return "greater_than";
    case Condition::less_than: return "less_than";
    case Condition::greater_equal: return "greater_equal";
    case Condition::less_equal: return "less_equal";
    case Condition::in: return "in";
    case Condition::between: return "between";
  }
  return "equals";
}

std::optional<Condition> parse_condition(std::string_view text) {
  static const std::map<std::string, Condition> names = {
      {"equals", Condition::equals},
      {"equal", Condition::equals},
      {"equal_to", Condition::equals},
      {"eq", Condition::equals},
      {"is", Condition::equals},
      {"=", Condition::equals},
      {"==", Condition::equals},
      {"not_equals", Condition::not_equals},
      {"not_equal", Condition::not_equals},
      {"not_equal_to", Condition::not_equals},
      {"ne", Condition::not_equals},
      {"is_not", Condition::not_equals},
      {"!=", Condition::not_equals},
      {"<>", Condition::not_equals},
      {"greater_than", Condition::greater_than},
      {"more_than", Condition::greater_than},
      {"above", Condition::greater_than},
      {"gt", Condition::greater_than},
      {">", Condition::greater_than},
      {"less_than", Condition::less_than},
      {"fewer_than", Condition::less_than},
      {"below", Condition::less_than},
      {"lt", Condition::less_than},
      {"<", Condition::less_than},
      {"greater_equal", Condition::greater_equal},
      {"greater_than_or_equal", Condition::greater_equal},
      {"greater_or_equal", Condition::greater_equal},
      {"at_least", Condition::greater_equal},
      {"ge", Condition::greater_equal},
      {"gte", Condition::greater_equal},
      {">=", Condition::greater_equal},
      {"less_equal", Condition::less_equal},
      {"less_than_or_equal", Condition::less_equal},
      {"less_or_equal", Condition::less_equal},
      {"at_most", Condition::less_equal},
      {"le", Condition::less_equal},
      {"lte", Condition::less_equal},
      {"<=", Condition::less_equal},
      {"in", Condition::in},
      {"one_of", Condition::in},
      {"between", Condition::between},
  };
  auto it = names.find(util::normalize_name(text));
  if (it == names.end()) return std::nullopt;
  return it->second;
}

std::string canonical_slot_name(const SlotSchema& schema, std::string_view key) {
  std::string k = util::normalize_name(key);
  if (k == "problem_type" || k == "task" || k == "task_type") return "problem_type";
  if (schema.find(k)) return k;
  static const std::map<std::string, std::string> synonyms = {
      {"target_variables", "target_variable"},
      {"target", "target_variable"},
      {"targets", "target_variable"},
      {"feature", "features"},
      {"feature_columns", "features"},
      {"size", "dataset_size"},
      {"performance_metric", "performance_metrics"},
      {"metrics", "performance_metrics"},
      {"metric", "performance_metrics"},
      {"validation", "validation_method"},
      {"validation_methods", "validation_method"},
      {"data_filter", "data_filters"},
      {"filters", "data_filters"},
      {"business_goal", "business_goals"},
      {"additional_requirement", "additional_requirements"},
      {"requirements", "additional_requirements"},
      {"model_preference", "model_preferences"},
      {"preferences", "model_preferences"},
      {"horizon", "forecast_horizon"},
  };
  if (auto it = synonyms.find(k); it != synonyms.end() && schema.find(it->second)) return it->second;
  if (k == "methods" || k == "method" || k == "models") return schema.methods_slot();
  // classification_method, time_series_forecasting_methods, ...
  if (k.size() > 7 && k.find("method") != std::string::npos) {
    const std::string& ms = schema.methods_slot();
    const std::string stem = ms.substr(0, ms.size() - 8);
    if (util::starts_with(k, stem)) return ms;
  }
  return "";
}

Json coerce_slot_value(const Slot& slot, const Json& raw) {
  if (raw.is_null()) return nullptr;
  if (raw.is_string() && raw.get<std::string>() == kSkipped) {
    if (slot.required) throw TypeMismatch(slot.name, "required slots cannot be skipped");
    return raw;
  }
  if (raw.is_string()) {
    const std::string l = util::to_lower(util::trim(raw.get<std::string>()));
    if (l == "none" || l == "null" || l.empty()) return nullptr;
  }
  switch (slot.kind) {
    case SlotKind::scalar: {
      if (slot.name == "dataset_size") {
        const Json& v = raw.is_array() && raw.size() == 1 ? raw[0] : raw;
        if (!is_scalar(v) || v.is_boolean()) throw TypeMismatch(slot.name, "must be a positive integer or Default");
        return coerce_dataset_size(v);
      }
      if (is_scalar(raw)) return raw;
      if (raw.is_array() && raw.size() == 1 && is_scalar(raw[0])) return raw;
      if (raw.is_array() && raw.empty()) return nullptr;
      throw TypeMismatch(slot.name, "expects a single value");
    }
    case SlotKind::list: {
      if (is_scalar(raw)) return Json::array({raw});
      if (!raw.is_array()) throw TypeMismatch(slot.name, "expects a list of values");
      if (raw.empty()) return nullptr;
      for (const auto& x : raw) {
        if (!is_scalar(x)) throw TypeMismatch(slot.name, "list entries must be single values");
      }
      return raw;
    }
    case SlotKind::filter_list: {
      Json out = Json::array();
      if (raw.is_object()) {
        out.push_back(coerce_filter(raw));
      } else if (raw.is_array()) {
        for (const auto& f : raw) out.push_back(coerce_filter(f));
      } else {
        throw TypeMismatch(slot.name, "expects a list of {column, condition, value}");
      }
      if (out.empty()) return nullptr;
      return out;
    }
  }
  return raw;
}

Petel::Petel(MlTask task) : task_(task) {
  for (const auto& s : schema().slots) values_[s.name] = nullptr;
}

const Json& Petel::get(std::string_view slot) const {
  auto it = values_.find(std::string(slot));
  if (it == values_.end()) throw UnknownSlot(std::string(slot));
  return it->second;
}

void Petel::set(std::string_view slot, const Json& value) {
  const Slot* s = schema().find(slot);
  if (!s) throw UnknownSlot(std::string(slot));
  values_[s->name] = coerce_slot_value(*s, value);
}

bool Petel::is_filled(std::string_view slot) const {
  const Json& v = get(slot);
  if (v.is_null()) return false;
  const Slot* s = schema().find(slot);
  if (s->kind == SlotKind::filter_list && v.is_array()) {
    return std::any_of(v.begin(), v.end(), [](const Json& f) { return f.is_object() && !f["column"].is_null(); });
  }
  return true;
}

bool Petel::is_skipped(std::string_view slot) const {
  const Json& v = get(slot);
  return v.is_string() && v.get<std::string>() == kSkipped;
}

std::vector<FilterSpec> Petel::filters() const {
  std::vector<FilterSpec> out;
  auto it = values_.find("data_filters");
  if (it == values_.end() || !it->second.is_array()) return out;
  for (const auto& f : it->second) {
    if (!f["column"].is_string() || !f["condition"].is_string()) continue;
    out.push_back({f["column"].get<std::string>(), *parse_condition(f["condition"].get<std::string>()), f["value"]});
  }
  return out;
}

std::optional<std::string> Petel::scalar_text(std::string_view slot) const {
  const Json& v = get(slot);
  const Json& x = v.is_array() && v.size() == 1 ? v[0] : v;
  if (x.is_null() || (x.is_string() && x.get<std::string>() == kSkipped)) return std::nullopt;
  if (x.is_string()) return x.get<std::string>();
  if (x.is_number_integer()) return std::to_string(x.get<long long>());
  if (x.is_number()) return util::format_number(x.get<double>());
  if (x.is_boolean()) return x.get<bool>() ? "true" : "false";
  return x.dump();
}

std::vector<std::string> Petel::list_text(std::string_view slot) const {
  const Json& v = get(slot);
  std::vector<std::string> out;
  if (v.is_null() || (v.is_string() && v.get<std::string>() == kSkipped)) return out;
  auto text = [](const Json& x) -> std::string {
    if (x.is_string()) return x.get<std::string>();
    if (x.is_number_integer()) return std::to_string(x.get<long long>());
    if (x.is_number()) return util::format_number(x.get<double>());
    return x.dump();
  };
  if (v.is_array()) {
    for (const auto& x : v) out.push_back(text(x));
  } else {
    out.push_back(text(v));
  }
  return out;
}

OrderedJson Petel::to_json() const {
  OrderedJson j;
  j["problem_type"] = std::string(to_string(task_));
  for (const auto& s : schema().slots) j[s.name] = OrderedJson::parse(values_.at(s.name).dump());
  return j;
}

Petel petel_from_json(const Json& object) {
  if (!object.is_object()) throw ValidationError("InvalidPetel", "a PeTEL must be an object");
  std::optional<MlTask> task;
  for (auto it = object.begin(); it != object.end(); ++it) {
    if (util::normalize_name(it.key()) == "problem_type") {
      if (!it.value().is_string() || !(task = parse_task(it.value().get<std::string>()))) {
        throw TypeMismatch("problem_type", "unknown problem type " + it.value().dump());
      }
    }
  }
  if (!task) throw ValidationError("InvalidPetel", "PeTEL has no problem_type");
  Petel p(*task);
  for (auto it = object.begin(); it != object.end(); ++it) {
    const std::string name = canonical_slot_name(p.schema(), it.key());
    if (name.empty()) throw UnknownSlot(it.key());
    if (name == "problem_type") continue;
    p.set(name, it.value());
  }
  return p;
}

Petel parse_petel(std::string_view text) {
  Json object;
  try {
    object = gateway::parse_relaxed(util::trim(text));
  } catch (const ValidationError&) {
    object = gateway::extract_object(text);
  }
  return petel_from_json(object);
}

std::string serialize_petel(const Petel& petel) { return petel.to_json().dump(2); }

Completeness is_complete(const Petel& petel) {
  Completeness c;
  for (const auto& s : petel.schema().slots) {
    if (s.required && !petel.is_filled(s.name)) c.missing.push_back(s.name);
  }
  c.complete = c.missing.empty();
  return c;
}

std::optional<std::string> next_unfilled_slot(const Petel& petel) {
  for (const auto& name : petel.schema().ask_order) {
    if (!petel.is_filled(name)) return name;
  }
  return std::nullopt;
}

Petel skip_optional(const Petel& petel) {
  Petel out = petel;
  for (const auto& s : petel.schema().slots) {
    if (!s.required && !petel.is_filled(s.name)) out.set(s.name, kSkipped);
  }
  return out;
}

Progress progress(const Petel& petel) {
  Progress p;
  for (const auto& s : petel.schema().slots) (petel.is_filled(s.name) ? p.filled : p.missing).push_back(s.name);
  return p;
}

}  // namespace dschat::petel
