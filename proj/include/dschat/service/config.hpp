#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

#include "dschat/dialogue/engine.hpp"
#include "dschat/gateway/gateway.hpp"
#include "dschat/gateway/http_provider.hpp"
#include "dschat/json.hpp"

namespace dschat::service {

// Defaults, then the JSON config file, then the environment.
//   DSCHAT_HOST, DSCHAT_PORT, DSCHAT_DATA_DIR, DSCHAT_SCRIPT, DSCHAT_BACKEND, DSCHAT_TELER_LEVEL,
//   DSCHAT_SEED, DSCHAT_CORS_ORIGIN, DSCHAT_TOKEN, DSCHAT_THREADS, DSCHAT_TRAIN_TIMEOUT_S
//   and the DSCHAT_LLM_* provider variables.
struct ServiceConfig {
  std::string host = "127.0.0.1";
  int port = 8080;
  std::filesystem::path data_dir = "sessions";
  std::filesystem::path script;  // scripted transcript; replaces the HTTP provider when set
  bool script_strict = false;
  gateway::HttpProviderConfig llm;
  std::string backend = "builtin";
  std::optional<int> teler_level;
  std::uint64_t seed = 0;
  std::string cors_origin = "*";
  std::string bearer_token;  // empty disables auth
  int threads = 8;
  std::chrono::seconds train_timeout{600};

  // Keys absent from the file keep the value in `base`.
  static ServiceConfig from_json(const Json& j, ServiceConfig base);
  static ServiceConfig from_json(const Json& j);
  static ServiceConfig from_file(const std::filesystem::path& file, ServiceConfig base);
  static ServiceConfig from_file(const std::filesystem::path& file);
  ServiceConfig with_env() const;
  Json to_json() const;  // api key and token redacted
};

gateway::Gateway make_gateway(const ServiceConfig& config);
dialogue::Engine make_engine(const ServiceConfig& config);

}  // namespace dschat::service
