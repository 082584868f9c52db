#include "dschat/results/results.hpp"

#include <algorithm>
#include <array>

#include "dschat/util/text.hpp"

namespace dschat::results {

namespace {

std::string metric_value(const Json& v) {
  if (v.is_number_integer()) return std::to_string(v.get<long long>());
  if (v.is_number()) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4f", v.get<double>());
    return buf;
  }
  return v.dump();
}

bool mentions_interpretability(const petel::Petel& p) {
  auto has = [](const std::string& s) { return util::contains_ci(s, "interpretab"); };
  if (auto pref = p.scalar_text("model_preferences"); pref && has(*pref)) return true;
  for (const auto& v : p.list_text("model_preferences")) {
    if (has(v)) return true;
  }
  return false;
}

std::string spaced(std::string_view s) {
  std::string out = util::to_lower(s);
  std::replace(out.begin(), out.end(), '_', ' ');
  return out;
}

}  // namespace

std::size_t interpretability_rank(std::string_view method) {
  static const std::array<std::string_view, 16> order = {
      "logistic_regression",    "linear_regression",         "ridge_regression",        "lasso_regression",
      "decision_tree_classifier", "decision_tree_regressor",   "naive_bayes",             "knn_classifier",
      "knn_regressor",          "svm_classifier",             "svm_regressor",           "random_forest_classifier",
      "random_forest_regressor", "gradient_boosting_classifier", "xgboost_classifier",   "xgboost_regressor",
  };
  for (std::size_t i = 0; i < order.size(); ++i) {
    if (order[i] == method) return i;
  }
  return order.size();
}

ResultSummary summarize_results(const engineering::TrainResponse& response, const petel::Petel& petel) {
  ResultSummary s;
  for (const auto& o : response.per_method) s.rows.push_back({o.method, o.status, o.metrics, o.message});

  std::vector<std::string> wanted;
  for (const auto& m : petel.list_text("performance_metrics")) {
    try {
      wanted.push_back(engineering::canonical_metric(m));
    } catch (const ValidationError&) {
      wanted.push_back(util::normalize_name(m));
    }
  }
  // table columns: requested scalar metrics first, then any others reported
  auto add_column = [&](const std::string& m) {
    if (std::find(s.metric_columns.begin(), s.metric_columns.end(), m) == s.metric_columns.end()) {
      s.metric_columns.push_back(m);
    }
  };
  for (const auto& m : wanted) {
    for (const auto& r : s.rows) {
      if (r.metrics.contains(m) && r.metrics[m].is_number()) {
        add_column(m);
        break;
      }
    }
  }
  for (const auto& r : s.rows) {
    for (auto it = r.metrics.begin(); it != r.metrics.end(); ++it) {
      if (it.value().is_number()) add_column(it.key());
    }
  }
  if (!s.metric_columns.empty()) s.deciding_metric = s.metric_columns.front();

  std::vector<std::size_t> ok;
  for (std::size_t i = 0; i < s.rows.size(); ++i) {
    if (s.rows[i].status == "ok") ok.push_back(i);
  }
  if (ok.empty()) throw NoSuccessfulMethods();

  const std::string& metric = s.deciding_metric;
  const bool ascending = engineering::is_error_metric(metric);
  const bool interpretable = mentions_interpretability(petel);
  auto score = [&](std::size_t i) -> std::optional<double> {
    const Json& m = s.rows[i].metrics;
    if (metric.empty() || !m.contains(metric) || !m[metric].is_number()) return std::nullopt;
    return m[metric].get<double>();
  };
  bool tie_broken = false;
  std::stable_sort(ok.begin(), ok.end(), [&](std::size_t a, std::size_t b) {
    const auto sa = score(a), sb = score(b);
    if (sa.has_value() != sb.has_value()) return sa.has_value();
    if (sa && *sa != *sb) return ascending ? *sa < *sb : *sa > *sb;
    if (interpretable) {
      const auto ra = interpretability_rank(s.rows[a].method), rb = interpretability_rank(s.rows[b].method);
      if (ra != rb) return ra < rb;
    }
    return a < b;
  });
  for (std::size_t i : ok) s.ranking.push_back(s.rows[i].method);
  s.recommended = s.ranking.front();
  if (ok.size() > 1 && score(ok[0]) == score(ok[1])) tie_broken = true;

  if (metric.empty() || !score(ok[0])) {
    s.rationale = s.recommended + " is the first method that trained successfully; no comparable metric was reported.";
  } else {
    s.rationale = s.recommended + " has the " + (ascending ? "lowest " : "highest ") + metric + " (" +
                  metric_value(s.rows[ok[0]].metrics[metric]) + ")";
    if (ok.size() > 1 && score(ok[1])) {
      s.rationale += tie_broken ? ", tied with " : ", ahead of ";
      s.rationale += s.rows[ok[1]].method + " (" + metric_value(s.rows[ok[1]].metrics[metric]) + ")";
    }
    s.rationale += ".";
    if (tie_broken) {
      s.rationale += interpretable ? " The tie was broken in favour of the more interpretable model."
                                   : " The tie was broken by the order the methods were requested.";
    }
  }
  return s;
}

Json ResultSummary::to_json() const {
  Json rs = Json::array();
  for (const auto& r : rows) {
    rs.push_back({{"method", r.method}, {"status", r.status}, {"metrics", r.metrics}, {"message", r.message}});
  }
  return {{"rows", rs},
          {"ranking", ranking},
          {"recommended", recommended},
          {"deciding_metric", deciding_metric},
          {"metric_columns", metric_columns},
          {"rationale", rationale}};
}

ResultSummary ResultSummary::from_json(const Json& j) {
  ResultSummary s;
  for (const auto& r : j.at("rows")) {
    s.rows.push_back({r.at("method").get<std::string>(), r.at("status").get<std::string>(), r.at("metrics"),
                      r.value("message", "")});
  }
  s.ranking = j.at("ranking").get<std::vector<std::string>>();
  s.recommended = j.at("recommended").get<std::string>();
  s.deciding_metric = j.value("deciding_metric", "");
  s.metric_columns = j.value("metric_columns", std::vector<std::string>{});
  s.rationale = j.value("rationale", "");
  return s;
}

std::string render_template(const ResultSummary& s) {
  std::string out = "Training results";
  if (!s.deciding_metric.empty()) out += " (ranked by " + s.deciding_metric + ")";
  out += ":\n\n| rank | method | status |";
  for (const auto& m : s.metric_columns) out += " " + m + " |";
  out += "\n|---|---|---|";
  for (std::size_t i = 0; i < s.metric_columns.size(); ++i) out += "---|";
  out += "\n";
  std::vector<const ResultRow*> ordered;
  for (const auto& name : s.ranking) {
    for (const auto& r : s.rows) {
      if (r.method == name) ordered.push_back(&r);
    }
  }
  for (const auto& r : s.rows) {
    if (r.status != "ok") ordered.push_back(&r);
  }
  std::size_t rank = 0;
  for (const ResultRow* r : ordered) {
    out += "| " + (r->status == "ok" ? std::to_string(++rank) : std::string("-")) + " | " + r->method + " | " +
           r->status + " |";
    for (const auto& m : s.metric_columns) {
      out += " " + (r->metrics.contains(m) ? metric_value(r->metrics[m]) : std::string("-")) + " |";
    }
    out += "\n";
  }
  for (const ResultRow* r : ordered) {
    for (auto it = r->metrics.begin(); it != r->metrics.end(); ++it) {
      if (it.value().is_array()) out += "\n" + it.key() + " for " + r->method + ": " + it.value().dump();
    }
  }
  bool notes = false;
  for (const ResultRow* r : ordered) {
    if (r->message.empty()) continue;
    if (!notes) out += "\n\nNotes:";
    notes = true;
    out += "\n- " + r->method + ": " + r->message;
  }
  out += "\n\nRecommended: " + s.recommended + ". " + s.rationale;
  return out;
}

std::string render_results(const ResultSummary& summary, const std::string& context, const gateway::Gateway& gw,
                           RenderMode mode) {
  const std::string plain = render_template(summary);
  if (mode == RenderMode::template_only) return plain;
  try {
    const gateway::Bindings bind = {{"context", context},
                                    {"state", "model_training"},
                                    {"input", "Summarize the training results for me."},
                                    {"intent", "Problem execution"},
                                    {"microprocess", "result summarizer"},
                                    {"mp_resp", plain}};
    const std::string reply = util::trim(gw.call(gateway::AgentId::conversation_manager, bind).raw_text);
    if (!reply.empty() && (reply.find(summary.recommended) != std::string::npos ||
                           spaced(reply).find(spaced(summary.recommended)) != std::string::npos)) {
      return reply;
    }
  } catch (const Error&) {
    // fall through to the template
  }
  return plain;
}

}  // namespace dschat::results
