#pragma once

#include <string>
#include <vector>

#include "dschat/engineering/training.hpp"
#include "dschat/gateway/gateway.hpp"
#include "dschat/petel/petel.hpp"

namespace dschat::results {

class NoSuccessfulMethods : public UpstreamError {
 public:
  NoSuccessfulMethods() : UpstreamError("NoSuccessfulMethods", "no method trained successfully") {}
};

struct ResultRow {
  std::string method;
  std::string status;
  Json metrics = Json::object();
  std::string message;
  bool operator==(const ResultRow&) const = default;
};

struct ResultSummary {
  std::vector<ResultRow> rows;        // response order
  std::vector<std::string> ranking;   // ok methods, best first
  std::string recommended;
  std::string deciding_metric;        // empty when no scalar metric was available
  std::vector<std::string> metric_columns;  // scalar metrics shown in the table
  std::string rationale;

  Json to_json() const;
  static ResultSummary from_json(const Json& j);
  bool operator==(const ResultSummary&) const = default;
};

// Position in the interpretability tie-break order; unlisted methods sort last.
std::size_t interpretability_rank(std::string_view method);

// Ranks ok methods by the first scalar PeTEL metric (ascending for error metrics). Ties go by
// interpretability when model_preferences mentions it, otherwise by response order.
ResultSummary summarize_results(const engineering::TrainResponse& response, const petel::Petel& petel);

enum class RenderMode { template_only, polished };

std::string render_template(const ResultSummary& summary);

// Polished mode rewrites the template through the conversation manager and keeps the rewrite
// only if it still names the recommended method.
std::string render_results(const ResultSummary& summary, const std::string& context, const gateway::Gateway& gw,
                           RenderMode mode);

}  // namespace dschat::results
