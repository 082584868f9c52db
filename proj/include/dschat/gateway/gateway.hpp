#pragma once

#include <chrono>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "dschat/gateway/provider.hpp"
#include "dschat/gateway/template_store.hpp"

namespace dschat::gateway {

struct RetryPolicy {
  int max_retries = 3;  // attempts after the first one
  std::vector<std::chrono::milliseconds> backoff{std::chrono::milliseconds(500), std::chrono::milliseconds(1000),
                                                 std::chrono::milliseconds(2000)};
};

using Sleeper = std::function<void(std::chrono::milliseconds)>;

// Sends the bundle, retrying Timeout and retryable TransportError per the policy.
// Rejects timeout <= 0 before dispatch. `attempts`, when given, receives the count.
ProviderResponse complete(const PromptBundle& bundle, Provider& provider, std::chrono::milliseconds timeout,
                          const RetryPolicy& retry = {}, const Sleeper& sleep = {}, int* attempts = nullptr);

struct CallRecord {
  AgentId agent;
  int level = 0;
  std::string fingerprint;
  std::string directive;
  std::string reply;
  std::string provider_id;
  int attempts = 0;
  std::chrono::milliseconds latency{0};
  std::string error;  // error code when the call failed
};

using CallObserver = std::function<void(const CallRecord&)>;

struct GatewayOptions {
  std::chrono::milliseconds timeout{std::chrono::seconds(60)};
  RetryPolicy retry;
  Sleeper sleep;  // empty means std::this_thread::sleep_for
  // Applied to the three ladder agents when they register that level.
  std::optional<int> teler_override;
  std::map<AgentId, int> levels;  // explicit per-agent levels win over everything
};

// Cheap to copy; shares the provider and templates.
class Gateway {
 public:
  explicit Gateway(std::shared_ptr<Provider> provider, GatewayOptions options = {},
                   std::shared_ptr<const TemplateStore> templates = nullptr);

  int level_for(AgentId agent) const;
  // Assembles the agent's prompt at its configured level, appending `suffix` to the directive.
  PromptBundle prepare(AgentId agent, const Bindings& bindings, std::string_view suffix = {}) const;
  ProviderResponse complete(const PromptBundle& bundle) const;
  ProviderResponse call(AgentId agent, const Bindings& bindings, std::string_view suffix = {}) const;

  Gateway with_observer(CallObserver observer) const;
  const TemplateStore& templates() const { return *templates_; }
  Provider& provider() const { return *provider_; }
  const GatewayOptions& options() const { return options_; }

 private:
  std::shared_ptr<Provider> provider_;
  GatewayOptions options_;
  std::shared_ptr<const TemplateStore> templates_;
  CallObserver observer_;
};

}  // namespace dschat::gateway
