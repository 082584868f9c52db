#include "dschat/service/config.hpp"

#include <cstdlib>
#include <fstream>

#include "dschat/gateway/scripted_provider.hpp"
#include "dschat/util/text.hpp"

namespace dschat::service {

namespace {

std::optional<std::string> env(const char* name) {
  const char* v = std::getenv(name);
  if (!v || !*v) return std::nullopt;
  return std::string(v);
}

long long to_int(const std::string& key, const std::string& text) {
  const auto n = util::parse_number(text);
  if (!n || *n != static_cast<double>(static_cast<long long>(*n))) {
    throw ValidationError("BadConfig", key + " must be an integer, got '" + text + "'");
  }
  return static_cast<long long>(*n);
}

int to_port(const std::string& key, long long v) {
  if (v < 0 || v > 65535) throw ValidationError("BadConfig", key + " out of range");
  return static_cast<int>(v);
}

}  // namespace

ServiceConfig ServiceConfig::from_json(const Json& j, ServiceConfig c) {
  if (!j.is_object()) throw ValidationError("BadConfig", "config must be a JSON object");
  try {
    for (auto it = j.begin(); it != j.end(); ++it) {
      const std::string& k = it.key();
      const Json& v = it.value();
      if (k == "host") c.host = v.get<std::string>();
      else if (k == "port") c.port = to_port(k, v.get<long long>());
      else if (k == "data_dir") c.data_dir = v.get<std::string>();
      else if (k == "script") c.script = v.get<std::string>();
      else if (k == "script_strict") c.script_strict = v.get<bool>();
      else if (k == "backend") c.backend = v.get<std::string>();
      else if (k == "teler_level") c.teler_level = v.is_null() ? std::nullopt : std::optional<int>(v.get<int>());
      else if (k == "seed") c.seed = v.get<std::uint64_t>();
      else if (k == "cors_origin") c.cors_origin = v.get<std::string>();
      else if (k == "bearer_token") c.bearer_token = v.get<std::string>();
      else if (k == "threads") c.threads = v.get<int>();
      else if (k == "train_timeout_s") c.train_timeout = std::chrono::seconds(v.get<long long>());
      else if (k == "llm") {
        c.llm.base_url = v.value("base_url", c.llm.base_url);
        c.llm.api_key = v.value("api_key", c.llm.api_key);
        c.llm.model = v.value("model", c.llm.model);
        if (v.contains("timeout_s")) {
          c.llm.timeout = std::chrono::milliseconds(static_cast<long long>(v["timeout_s"].get<double>() * 1000));
        }
        c.llm.temperature = v.value("temperature", c.llm.temperature);
      } else {
        throw ValidationError("BadConfig", "unknown config key '" + k + "'");
      }
    }
  } catch (const Json::exception& e) {
    throw ValidationError("BadConfig", std::string("config value has the wrong type: ") + e.what());
  }
  if (c.threads < 1) throw ValidationError("BadConfig", "threads must be at least 1");
  return c;
}

ServiceConfig ServiceConfig::from_json(const Json& j) { return from_json(j, ServiceConfig()); }

ServiceConfig ServiceConfig::from_file(const std::filesystem::path& file) { return from_file(file, ServiceConfig()); }

ServiceConfig ServiceConfig::from_file(const std::filesystem::path& file, ServiceConfig base) {
  std::ifstream f(file);
  if (!f) throw ValidationError("BadConfig", "cannot read config file " + file.string());
  Json j;
  try {
    j = Json::parse(f);
  } catch (const Json::parse_error& e) {
    throw ValidationError("BadConfig", "config file is not JSON: " + std::string(e.what()));
  }
  return from_json(j, std::move(base));
}

ServiceConfig ServiceConfig::with_env() const {
  ServiceConfig c = *this;
  if (auto v = env("DSCHAT_HOST")) c.host = *v;
  if (auto v = env("DSCHAT_PORT")) c.port = to_port("DSCHAT_PORT", to_int("DSCHAT_PORT", *v));
  if (auto v = env("DSCHAT_DATA_DIR")) c.data_dir = *v;
  if (auto v = env("DSCHAT_SCRIPT")) c.script = *v;
  if (auto v = env("DSCHAT_BACKEND")) c.backend = *v;
  if (auto v = env("DSCHAT_TELER_LEVEL")) c.teler_level = static_cast<int>(to_int("DSCHAT_TELER_LEVEL", *v));
  if (auto v = env("DSCHAT_SEED")) c.seed = static_cast<std::uint64_t>(to_int("DSCHAT_SEED", *v));
  if (auto v = env("DSCHAT_CORS_ORIGIN")) c.cors_origin = *v;
  if (auto v = env("DSCHAT_TOKEN")) c.bearer_token = *v;
  if (auto v = env("DSCHAT_THREADS")) c.threads = static_cast<int>(to_int("DSCHAT_THREADS", *v));
  if (auto v = env("DSCHAT_TRAIN_TIMEOUT_S")) c.train_timeout = std::chrono::seconds(to_int("DSCHAT_TRAIN_TIMEOUT_S", *v));
  const auto llm = gateway::HttpProviderConfig::from_env();
  if (env("DSCHAT_LLM_BASE_URL")) c.llm.base_url = llm.base_url;
  if (env("DSCHAT_LLM_API_KEY")) c.llm.api_key = llm.api_key;
  if (env("DSCHAT_LLM_MODEL")) c.llm.model = llm.model;
  if (env("DSCHAT_LLM_TIMEOUT_S")) c.llm.timeout = llm.timeout;
  if (c.threads < 1) throw ValidationError("BadConfig", "threads must be at least 1");
  return c;
}

Json ServiceConfig::to_json() const {
  return {{"host", host},
          {"port", port},
          {"data_dir", data_dir.string()},
          {"script", script.string()},
          {"script_strict", script_strict},
          {"backend", backend},
          {"teler_level", teler_level ? Json(*teler_level) : Json()},
          {"seed", seed},
          {"cors_origin", cors_origin},
          {"bearer_token", bearer_token.empty() ? "" : "***"},
          {"threads", threads},
          {"train_timeout_s", train_timeout.count()},
          {"llm",
           {{"base_url", llm.base_url},
            {"api_key", llm.api_key.empty() ? "" : "***"},
            {"model", llm.model},
            {"timeout_s", static_cast<double>(llm.timeout.count()) / 1000.0},
            {"temperature", llm.temperature}}}};
}

gateway::Gateway make_gateway(const ServiceConfig& config) {
  std::shared_ptr<gateway::Provider> provider;
  if (!config.script.empty()) {
    provider = gateway::ScriptedProvider::from_file(config.script, config.script_strict);
  } else {
    provider = std::make_shared<gateway::HttpProvider>(config.llm);
  }
  gateway::GatewayOptions opts;
  opts.timeout = config.llm.timeout;
  opts.teler_override = config.teler_level;
  return gateway::Gateway(std::move(provider), opts);
}

dialogue::Engine make_engine(const ServiceConfig& config) {
  dialogue::EngineOptions eo;
  eo.backend = engineering::make_backend(config.backend);
  eo.seed = config.seed;
  eo.train_timeout = config.train_timeout;
  return dialogue::Engine(make_gateway(config), eo);
}

}  // namespace dschat::service
