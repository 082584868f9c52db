#include "dschat/engineering/engineering.hpp"

#include <algorithm>
#include <chrono>
#include <map>
#include <numeric>
#include <regex>
#include <set>

#include "dschat/util/text.hpp"

namespace dschat::engineering {

using dataset::ColumnKind;
using petel::Condition;

namespace {

std::string candidates_text(const std::vector<std::string>& c) {
  return c.empty() ? "" : " (closest: " + util::join(c, ", ") + ")";
}

std::optional<double> cell_number(const dataset::Cell& c) {
  if (!c) return std::nullopt;
  return util::parse_number(util::trim(*c));
}

std::optional<double> json_number(const Json& v) {
  if (v.is_number()) return v.get<double>();
  if (v.is_string()) return util::parse_number(util::trim(v.get<std::string>()));
  return std::nullopt;
}

std::string json_text(const Json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number_integer()) return std::to_string(v.get<long long>());
  if (v.is_number()) return util::format_number(v.get<double>());
  if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
  return v.dump();
}

bool is_numeric_condition(Condition c) {
  return c == Condition::greater_than || c == Condition::less_than || c == Condition::greater_equal ||
         c == Condition::less_equal || c == Condition::between;
}

// One compiled filter: a predicate over a present cell.
struct Compiled {
  std::size_t column;
  bool numeric;
  Condition cond;
  std::vector<double> nums;
  std::vector<std::string> texts;

  bool test(const dataset::Cell& cell) const {
    if (!cell) return false;
    if (numeric) {
      auto v = cell_number(cell);
      if (!v) return false;
      switch (cond) {
        case Condition::equals: return *v == nums[0];
        case Condition::not_equals: return *v != nums[0];
        case Condition::greater_than: return *v > nums[0];
        case Condition::less_than: return *v < nums[0];
        case Condition::greater_equal: return *v >= nums[0];
        case Condition::less_equal: return *v <= nums[0];
        case Condition::between: return *v >= nums[0] && *v <= nums[1];
        case Condition::in: return std::find(nums.begin(), nums.end(), *v) != nums.end();
      }
      return false;
    }
    const std::string s = util::trim(*cell);
    switch (cond) {
      case Condition::equals: return s == texts[0];
      case Condition::not_equals: return s != texts[0];
      case Condition::in: return std::find(texts.begin(), texts.end(), s) != texts.end();
      default: return false;
    }
  }
};

Compiled compile(const Dataset& d, const petel::FilterSpec& f) {
  Compiled c{resolve_column(d, f.column), false, f.condition, {}, {}};
  const ColumnKind kind = d.columns[c.column].kind;
  c.numeric = kind == ColumnKind::numeric;
  const std::string& col = d.columns[c.column].name;
  const auto cond = petel::to_string(f.condition);
  std::vector<Json> values;
  if (f.condition == Condition::between || f.condition == Condition::in) {
    if (!f.value.is_array()) throw IncompatibleCondition(col, cond, "needs a list value");
    values.assign(f.value.begin(), f.value.end());
    if (f.condition == Condition::between && values.size() != 2) throw IncompatibleCondition(col, cond, "needs [low, high]");
    if (values.empty()) throw IncompatibleCondition(col, cond, "needs at least one value");
  } else {
    if (f.value.is_null() || f.value.is_array() || f.value.is_object()) {
      throw IncompatibleCondition(col, cond, "needs a single value");
    }
    values.push_back(f.value);
  }
  if (c.numeric) {
    for (const auto& v : values) {
      auto n = json_number(v);
      if (!n) throw IncompatibleCondition(col, cond, "column is numeric but the value " + json_text(v) + " is not");
      c.nums.push_back(*n);
    }
  } else {
    if (is_numeric_condition(f.condition)) {
      throw IncompatibleCondition(col, cond, "column is " + std::string(dataset::to_string(kind)) + ", not numeric");
    }
    for (const auto& v : values) c.texts.push_back(util::trim(json_text(v)));
  }
  return c;
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : (v[n / 2 - 1] + v[n / 2]) / 2.0;
}

// Most frequent value; ties go to the lexically smallest.
std::string mode(const std::map<std::string, std::size_t>& counts) {
  std::string best;
  std::size_t n = 0;
  for (const auto& [k, c] : counts) {
    if (c > n) {
      best = k;
      n = c;
    }
  }
  return best;
}

}  // namespace

UnknownColumn::UnknownColumn(std::string name, std::vector<std::string> candidates)
    : ValidationError("UnknownColumn", "no column named " + name + candidates_text(candidates)),
      name_(std::move(name)),
      candidates_(std::move(candidates)) {}

std::vector<std::string> nearest_columns(const Dataset& dataset, std::string_view name, std::size_t k) {
  const std::string key = util::normalize_name(name);
  std::vector<std::pair<std::size_t, std::size_t>> scored;
  for (std::size_t i = 0; i < dataset.columns.size(); ++i) {
    scored.emplace_back(util::levenshtein(key, util::normalize_name(dataset.columns[i].name)), i);
  }
  std::stable_sort(scored.begin(), scored.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  std::vector<std::string> out;
  for (std::size_t i = 0; i < scored.size() && i < k; ++i) out.push_back(dataset.columns[scored[i].second].name);
  return out;
}

std::size_t resolve_column(const Dataset& dataset, std::string_view name) {
  if (auto exact = dataset.column_index(name)) return *exact;
  const std::string key = util::normalize_name(name);
  for (std::size_t i = 0; i < dataset.columns.size(); ++i) {
    if (util::normalize_name(dataset.columns[i].name) == key) return i;
  }
  throw UnknownColumn(std::string(name), nearest_columns(dataset, name));
}

AttributePlan petel_to_attributes(const petel::Petel& petel, const Dataset& dataset) {
  const auto c = petel::is_complete(petel);
  if (!c.complete) {
    throw ValidationError("IncompletePetel", "PeTEL is missing " + util::join(c.missing, ", "));
  }
  AttributePlan plan;
  std::optional<std::size_t> target;
  if (petel.schema().has_target()) {
    target = resolve_column(dataset, *petel.scalar_text("target_variable"));
    plan.target = dataset.columns[*target].name;
  }
  std::vector<std::string> names = petel.list_text("features");
  const bool all = names.empty() ||
                   (names.size() == 1 && (util::to_lower(util::trim(names[0])) == "all" ||
                                          util::to_lower(util::trim(names[0])) == "default"));
  if (all) {
    for (std::size_t i = 0; i < dataset.columns.size(); ++i) {
      if (!target || i != *target) plan.feature_columns.push_back(dataset.columns[i].name);
    }
    return plan;
  }
  std::set<std::size_t> seen;
  for (const auto& n : names) {
    const std::size_t i = resolve_column(dataset, n);
    if (target && i == *target) throw TargetInFeatures(dataset.columns[i].name);
    if (seen.insert(i).second) plan.feature_columns.push_back(dataset.columns[i].name);
  }
  return plan;
}

Dataset apply_filters(const Dataset& dataset, const std::vector<petel::FilterSpec>& filters) {
  std::vector<Compiled> compiled;
  for (const auto& f : filters) compiled.push_back(compile(dataset, f));
  Dataset out;
  out.name = dataset.name;
  out.columns = dataset.columns;
  for (std::size_t r = 0; r < dataset.rows.size(); ++r) {
    const auto& row = dataset.rows[r];
    const bool keep = std::all_of(compiled.begin(), compiled.end(), [&](const Compiled& c) { return c.test(row[c.column]); });
    if (!keep) continue;
    out.rows.push_back(row);
    out.row_ids.push_back(r < dataset.row_ids.size() ? dataset.row_ids[r] : r);
  }
  return out;
}

std::optional<double> datetime_days(std::string_view s) {
  static const std::regex re(R"(^\s*(\d{4})-(\d{2})-(\d{2})(?:[T ](\d{2}):(\d{2})(?::(\d{2}(?:\.\d+)?))?)?\s*(?:Z|[+-]\d{2}:?\d{2})?\s*$)");
  std::cmatch m;
  if (!std::regex_match(s.data(), s.data() + s.size(), m, re)) return std::nullopt;
  using namespace std::chrono;
  const year_month_day ymd{year{std::stoi(m[1].str())}, month{static_cast<unsigned>(std::stoi(m[2].str()))},
                           day{static_cast<unsigned>(std::stoi(m[3].str()))}};
  if (!ymd.ok()) return std::nullopt;
  double days = static_cast<double>(sys_days(ymd).time_since_epoch().count());
  if (m[4].matched) {
    const double secs = std::stoi(m[4].str()) * 3600.0 + std::stoi(m[5].str()) * 60.0 +
                        (m[6].matched ? std::stod(m[6].str()) : 0.0);
    days += secs / 86400.0;
  }
  return days;
}

PreparedMatrix prep_data(const Dataset& dataset, const AttributePlan& plan, petel::MlTask task) {
  if (dataset.rows.empty()) throw EmptyAfterFilter();
  PreparedMatrix m;
  m.dropped = plan.dropped;
  const bool classification = task == petel::MlTask::classification;

  // Rows without a usable target are left out.
  std::vector<std::size_t> rows;
  std::vector<double> y_raw;
  std::vector<std::string> y_text;
  std::optional<std::size_t> target;
  if (plan.target) target = resolve_column(dataset, *plan.target);
  std::size_t skipped_target = 0;
  for (std::size_t r = 0; r < dataset.rows.size(); ++r) {
    if (target) {
      const auto& cell = dataset.rows[r][*target];
      if (!cell || util::trim(*cell).empty()) {
        ++skipped_target;
        continue;
      }
      if (classification) {
        y_text.push_back(util::trim(*cell));
      } else {
        auto v = cell_number(cell);
        if (!v) {
          ++skipped_target;
          continue;
        }
        y_raw.push_back(*v);
      }
    }
    rows.push_back(r);
  }
  if (rows.empty()) throw EmptyAfterFilter();
  if (skipped_target) m.notes.push_back(std::to_string(skipped_target) + " row(s) without a usable target were left out");

  if (target) {
    if (classification) {
      std::set<std::string> classes(y_text.begin(), y_text.end());
      if (classes.size() < 2) throw DegenerateTarget(classes.size());
      m.labels.assign(classes.begin(), classes.end());
      for (const auto& t : y_text) {
        m.y.push_back(static_cast<double>(std::lower_bound(m.labels.begin(), m.labels.end(), t) - m.labels.begin()));
      }
    } else {
      std::set<double> distinct(y_raw.begin(), y_raw.end());
      if (distinct.size() < 2) throw DegenerateTarget(distinct.size());
      m.y = y_raw;
    }
  }

  m.x.assign(rows.size(), {});
  for (const auto& name : plan.feature_columns) {
    const std::size_t c = resolve_column(dataset, name);
    const ColumnKind kind = dataset.columns[c].kind;
    ColumnEncoding enc;
    enc.column = dataset.columns[c].name;
    enc.first = m.columns.size();

    if (kind == ColumnKind::numeric || kind == ColumnKind::datetime) {
      const bool dt = kind == ColumnKind::datetime;
      std::vector<std::optional<double>> vals;
      std::vector<double> present;
      for (std::size_t r : rows) {
        const auto& cell = dataset.rows[r][c];
        std::optional<double> v = !cell ? std::nullopt : dt ? datetime_days(*cell) : cell_number(cell);
        vals.push_back(v);
        if (v) present.push_back(*v);
      }
      if (present.empty()) {
        m.dropped.push_back({enc.column, "all values missing"});
        continue;
      }
      const double fill = median(present);
      std::vector<double> col;
      for (const auto& v : vals) {
        col.push_back(v.value_or(fill));
        if (!v) ++enc.imputed;
      }
      if (std::all_of(col.begin(), col.end(), [&](double v) { return v == col[0]; })) {
        m.dropped.push_back({enc.column, "constant"});
        continue;
      }
      enc.kind = dt ? "datetime_days" : "identity";
      if (enc.imputed) enc.fill = util::format_number(fill);
      for (std::size_t i = 0; i < rows.size(); ++i) m.x[i].push_back(col[i]);
      m.columns.push_back(enc.column);
    } else {
      std::vector<std::optional<std::string>> vals;
      std::map<std::string, std::size_t> counts;
      for (std::size_t r : rows) {
        const auto& cell = dataset.rows[r][c];
        if (cell) {
          vals.push_back(util::trim(*cell));
          ++counts[*vals.back()];
        } else {
          vals.emplace_back();
        }
      }
      if (counts.empty()) {
        m.dropped.push_back({enc.column, "all values missing"});
        continue;
      }
      const std::string fill = mode(counts);
      for (auto& v : vals) {
        if (!v) {
          v = fill;
          ++enc.imputed;
        }
      }
      if (counts.size() == 1) {
        m.dropped.push_back({enc.column, "constant"});
        continue;
      }
      enc.kind = "one_hot";
      for (const auto& [k, n] : counts) enc.categories.push_back(k);
      enc.width = enc.categories.size();
      if (enc.imputed) enc.fill = fill;
      for (std::size_t i = 0; i < rows.size(); ++i) {
        const auto pos = static_cast<std::size_t>(
            std::lower_bound(enc.categories.begin(), enc.categories.end(), *vals[i]) - enc.categories.begin());
        for (std::size_t k = 0; k < enc.width; ++k) m.x[i].push_back(k == pos ? 1.0 : 0.0);
      }
      for (const auto& k : enc.categories) m.columns.push_back(enc.column + "=" + k);
    }
    m.encoding.push_back(std::move(enc));
  }
  if (m.columns.empty()) throw ValidationError("NoUsableFeatures", "every feature column was dropped");

  for (std::size_t r : rows) m.row_index.push_back(r < dataset.row_ids.size() ? dataset.row_ids[r] : r);
  m.notes.push_back("outliers are not removed; robustness requests are passed to the backend");
  return m;
}

}  // namespace dschat::engineering
