#pragma once

#include <memory>
#include <string>

#include "dschat/gateway/provider.hpp"

namespace dschat::gateway {

struct HttpProviderConfig {
  std::string base_url;  // e.g. https://api.openai.com/v1
  std::string api_key;
  std::string model = "gpt-3.5-turbo";
  std::chrono::milliseconds timeout{std::chrono::seconds(60)};
  double temperature = 0.0;

  // DSCHAT_LLM_BASE_URL, DSCHAT_LLM_API_KEY, DSCHAT_LLM_MODEL, DSCHAT_LLM_TIMEOUT_S.
  static HttpProviderConfig from_env();
};

// OpenAI-compatible chat/completions client. The system setup becomes the system
// message, demonstrations alternate user/assistant, and the directive is the last user turn.
class HttpProvider : public Provider {
 public:
  explicit HttpProvider(HttpProviderConfig config);

  ProviderResponse complete(const PromptBundle& bundle, std::chrono::milliseconds timeout) override;
  std::string id() const override { return "http:" + config_.model; }
  bool uses_network() const override { return true; }

  const HttpProviderConfig& config() const { return config_; }

 private:
  HttpProviderConfig config_;
  std::string origin_;
  std::string path_prefix_;
};

}  // namespace dschat::gateway
