#include "dschat/gateway/gateway.hpp"

#include <thread>

namespace dschat::gateway {

ProviderResponse complete(const PromptBundle& bundle, Provider& provider, std::chrono::milliseconds timeout,
                          const RetryPolicy& retry, const Sleeper& sleep, int* attempts) {
  if (timeout <= std::chrono::milliseconds(0)) {
    throw ValidationError("InvalidTimeout", "timeout must be positive");
  }
  int attempt = 0;
  for (;;) {
    ++attempt;
    if (attempts) *attempts = attempt;
    try {
      return provider.complete(bundle, timeout);
    } catch (const TransportError& e) {
      if (!e.retryable() || attempt > retry.max_retries) throw;
    } catch (const TimeoutError&) {
      if (attempt > retry.max_retries) throw;
    }
    std::chrono::milliseconds delay{0};
    if (!retry.backoff.empty()) {
      const auto idx = std::min<std::size_t>(static_cast<std::size_t>(attempt - 1), retry.backoff.size() - 1);
      delay = retry.backoff[idx];
    }
    if (sleep) {
      sleep(delay);
    } else {
      std::this_thread::sleep_for(delay);
    }
  }
}

Gateway::Gateway(std::shared_ptr<Provider> provider, GatewayOptions options,
                 std::shared_ptr<const TemplateStore> templates)
    : provider_(std::move(provider)), options_(std::move(options)), templates_(std::move(templates)) {
  if (!provider_) throw ValidationError("NoProvider", "gateway needs a provider");
  if (options_.timeout <= std::chrono::milliseconds(0)) {
    throw ValidationError("InvalidTimeout", "timeout must be positive");
  }
  if (!templates_) {
    // Embedded store lives for the whole program.
    templates_ = std::shared_ptr<const TemplateStore>(&TemplateStore::embedded(), [](const TemplateStore*) {});
  }
}

int Gateway::level_for(AgentId agent) const {
  if (auto it = options_.levels.find(agent); it != options_.levels.end()) return it->second;
  if (options_.teler_override && is_teler_agent(agent) && templates_->has_level(agent, *options_.teler_override)) {
    return *options_.teler_override;
  }
  return default_level(agent);
}

PromptBundle Gateway::prepare(AgentId agent, const Bindings& bindings, std::string_view suffix) const {
  PromptBundle bundle = assemble_prompt(templates_->get(agent, level_for(agent)), bindings);
  if (!suffix.empty()) {
    bundle.resolved_directive += suffix;
    bundle.fingerprint = fingerprint(agent, bundle.resolved_system_setup, bundle.resolved_directive);
  }
  return bundle;
}

ProviderResponse Gateway::complete(const PromptBundle& bundle) const {
  CallRecord rec;
  rec.agent = bundle.agent;
  rec.level = bundle.teler_level;
  rec.fingerprint = bundle.fingerprint;
  rec.directive = bundle.resolved_directive;
  try {
    ProviderResponse resp =
        gateway::complete(bundle, *provider_, options_.timeout, options_.retry, options_.sleep, &rec.attempts);
    rec.reply = resp.raw_text;
    rec.provider_id = resp.provider_id;
    rec.latency = resp.latency;
    if (observer_) observer_(rec);
    return resp;
  } catch (const Error& e) {
    rec.error = e.code();
    rec.provider_id = provider_->id();
    if (observer_) observer_(rec);
    throw;
  }
}

ProviderResponse Gateway::call(AgentId agent, const Bindings& bindings, std::string_view suffix) const {
  return complete(prepare(agent, bindings, suffix));
}

Gateway Gateway::with_observer(CallObserver observer) const {
  Gateway copy = *this;
  copy.observer_ = std::move(observer);
  return copy;
}

}  // namespace dschat::gateway
