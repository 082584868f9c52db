#pragma once

#include <chrono>
#include <functional>
#include <mutex>
#include <string>

#include "dschat/errors.hpp"
#include "dschat/gateway/prompt.hpp"

namespace dschat::gateway {

struct ProviderResponse {
  std::string raw_text;
  std::chrono::milliseconds latency{0};
  std::string provider_id;
};

class TimeoutError : public UpstreamError {
 public:
  explicit TimeoutError(const std::string& what) : UpstreamError("Timeout", what) {}
};

class TransportError : public UpstreamError {
 public:
  explicit TransportError(const std::string& what, bool retryable = true)
      : TransportError("TransportError", what, retryable) {}
  bool retryable() const noexcept { return retryable_; }

 protected:
  TransportError(std::string code, const std::string& what, bool retryable)
      : UpstreamError(std::move(code), what), retryable_(retryable) {}

 private:
  bool retryable_;
};

// Non-2xx status or an explicit refusal from the model; never retried.
class ProviderRefusal : public UpstreamError {
 public:
  explicit ProviderRefusal(const std::string& what) : UpstreamError("ProviderRefusal", what) {}
};

// Providers must tolerate concurrent complete() calls.
class Provider {
 public:
  virtual ~Provider() = default;
  virtual ProviderResponse complete(const PromptBundle& bundle, std::chrono::milliseconds timeout) = 0;
  virtual std::string id() const = 0;
  // False for providers that never touch the network.
  virtual bool uses_network() const { return false; }
};

// Wraps a function; handy in tests.
class CallbackProvider : public Provider {
 public:
  using Fn = std::function<std::string(const PromptBundle&)>;
  explicit CallbackProvider(Fn fn, std::string id = "callback") : fn_(std::move(fn)), id_(std::move(id)) {}

  ProviderResponse complete(const PromptBundle& bundle, std::chrono::milliseconds) override {
    const auto start = std::chrono::steady_clock::now();
    std::string text;
    {
      std::lock_guard<std::mutex> lock(mu_);
      text = fn_(bundle);
    }
    return {std::move(text),
            std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - start), id_};
  }
  std::string id() const override { return id_; }

 private:
  Fn fn_;
  std::string id_;
  std::mutex mu_;
};

}  // namespace dschat::gateway
