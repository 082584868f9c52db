#include "dschat/gateway/http_provider.hpp"

#include <httplib.h>

#include <cstdlib>

#include "dschat/json.hpp"

namespace dschat::gateway {

namespace {

std::string env_or(const char* name, std::string fallback) {
  const char* v = std::getenv(name);
  return v && *v ? std::string(v) : fallback;
}

}  // namespace

HttpProviderConfig HttpProviderConfig::from_env() {
  HttpProviderConfig c;
  c.base_url = env_or("DSCHAT_LLM_BASE_URL", "");
  c.api_key = env_or("DSCHAT_LLM_API_KEY", "");
  c.model = env_or("DSCHAT_LLM_MODEL", c.model);
  const std::string t = env_or("DSCHAT_LLM_TIMEOUT_S", "");
  if (!t.empty()) {
    const double secs = std::strtod(t.c_str(), nullptr);
    if (secs <= 0) throw ValidationError("InvalidTimeout", "DSCHAT_LLM_TIMEOUT_S must be positive");
    c.timeout = std::chrono::milliseconds(static_cast<long long>(secs * 1000));
  }
  return c;
}

HttpProvider::HttpProvider(HttpProviderConfig config) : config_(std::move(config)) {
  if (config_.base_url.empty()) throw ValidationError("ProviderConfig", "provider base URL is not set");
  const auto scheme = config_.base_url.find("://");
  if (scheme == std::string::npos) throw ValidationError("ProviderConfig", "base URL needs a scheme: " + config_.base_url);
  const auto path = config_.base_url.find('/', scheme + 3);
  origin_ = config_.base_url.substr(0, path);
  path_prefix_ = path == std::string::npos ? "" : config_.base_url.substr(path);
  while (!path_prefix_.empty() && path_prefix_.back() == '/') path_prefix_.pop_back();
#ifndef CPPHTTPLIB_OPENSSL_SUPPORT
  if (config_.base_url.rfind("https://", 0) == 0) {
    throw ValidationError("ProviderConfig", "built without TLS support; https base URL unavailable");
  }
#endif
}

ProviderResponse HttpProvider::complete(const PromptBundle& bundle, std::chrono::milliseconds timeout) {
  Json messages = Json::array();
  if (!bundle.resolved_system_setup.empty()) {
    messages.push_back({{"role", "system"}, {"content", bundle.resolved_system_setup}});
  }
  for (const auto& d : bundle.demonstrations) {
    messages.push_back({{"role", d.role == Role::user ? "user" : "assistant"}, {"content", d.text}});
  }
  messages.push_back({{"role", "user"}, {"content", bundle.resolved_directive}});
  const Json body = {{"model", config_.model}, {"temperature", config_.temperature}, {"messages", messages}};

  httplib::Client client(origin_);
  const auto secs = std::chrono::duration_cast<std::chrono::seconds>(timeout);
  const auto usecs = std::chrono::duration_cast<std::chrono::microseconds>(timeout - secs);
  client.set_connection_timeout(secs.count(), usecs.count());
  client.set_read_timeout(secs.count(), usecs.count());
  client.set_write_timeout(secs.count(), usecs.count());
  httplib::Headers headers;
  if (!config_.api_key.empty()) headers.emplace("Authorization", "Bearer " + config_.api_key);

  const auto start = std::chrono::steady_clock::now();
  auto res = client.Post(path_prefix_ + "/chat/completions", headers, body.dump(), "application/json");
  const auto latency =
      std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - start);
  if (!res) {
    const auto err = res.error();
    if (err == httplib::Error::ConnectionTimeout || err == httplib::Error::Read) {
      throw TimeoutError("provider request failed: " + httplib::to_string(err));
    }
    throw TransportError("provider request failed: " + httplib::to_string(err));
  }
  if (res->status == 429 || res->status >= 500) {
    throw TransportError("provider returned HTTP " + std::to_string(res->status));
  }
  if (res->status < 200 || res->status >= 300) {
    throw ProviderRefusal("provider returned HTTP " + std::to_string(res->status) + ": " + res->body.substr(0, 200));
  }
  const Json reply = Json::parse(res->body, nullptr, false);
  if (reply.is_discarded() || !reply.contains("choices") || !reply["choices"].is_array() ||
      reply["choices"].empty()) {
    throw TransportError("provider reply is not a chat completion", false);
  }
  const Json& choice = reply["choices"][0];
  if (choice.value("finish_reason", "") == "content_filter") throw ProviderRefusal("provider refused the prompt");
  const Json& msg = choice.value("message", Json::object());
  if (msg.contains("refusal") && msg["refusal"].is_string() && !msg["refusal"].get<std::string>().empty()) {
    throw ProviderRefusal(msg["refusal"].get<std::string>());
  }
  if (!msg.contains("content") || !msg["content"].is_string()) {
    throw ProviderRefusal("provider returned no content");
  }
  return {msg["content"].get<std::string>(), latency, id()};
}

}  // namespace dschat::gateway
