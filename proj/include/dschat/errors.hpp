#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace dschat {

// How an error surfaces at the edges: HTTP status in the service, exit code in the CLI.
enum class ErrorCategory {
  validation,  // malformed input or a violated contract (422 / exit 3)
  upstream,    // provider or training backend failure (502 / exit 4)
  not_found,   // unknown session or resource (404)
  conflict,    // operation not valid in the current session state (409)
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCategory category, std::string code, const std::string& message)
      : std::runtime_error(message), category_(category), code_(std::move(code)) {}

  ErrorCategory category() const noexcept { return category_; }
  // Stable machine-readable name, e.g. "MissingBinding".
  const std::string& code() const noexcept { return code_; }

 private:
  ErrorCategory category_;
  std::string code_;
};

class ValidationError : public Error {
 public:
  ValidationError(std::string code, const std::string& message)
      : Error(ErrorCategory::validation, std::move(code), message) {}
};

class UpstreamError : public Error {
 public:
  UpstreamError(std::string code, const std::string& message)
      : Error(ErrorCategory::upstream, std::move(code), message) {}
};

class NotFoundError : public Error {
 public:
  NotFoundError(std::string code, const std::string& message)
      : Error(ErrorCategory::not_found, std::move(code), message) {}
};

class ConflictError : public Error {
 public:
  ConflictError(std::string code, const std::string& message)
      : Error(ErrorCategory::conflict, std::move(code), message) {}
};

}  // namespace dschat
