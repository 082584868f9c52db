#pragma once

#include <memory>
#include <string>

#include "dschat/dialogue/manager.hpp"
#include "dschat/errors.hpp"
#include "dschat/json.hpp"

namespace dschat::service {

int http_status(ErrorCategory category);
// {"error": {"code": ..., "message": ...}}
Json error_body(const std::string& code, const std::string& message);

struct ServerOptions {
  std::string cors_origin = "*";
  std::string bearer_token;  // empty disables auth
  int threads = 8;
};

// Endpoints:
//   POST /v1/sessions                     -> 201 {session_id, state}
//   GET  /v1/sessions                     -> {sessions: [...]}
//   POST /v1/sessions/{id}/dataset        CSV body, optional ?name= -> summary + suggestions
//   POST /v1/sessions/{id}/messages       {"text": ...} -> {reply, state, petel_progress}
//   GET  /v1/sessions/{id}                -> session record
//   GET  /v1/sessions/{id}/results        -> result summary
//   GET  /v1/health
class Server {
 public:
  Server(std::shared_ptr<dialogue::SessionManager> manager, ServerOptions options = {});
  ~Server();
  Server(const Server&) = delete;
  Server& operator=(const Server&) = delete;

  // Port 0 picks a free port; returns the bound port or throws.
  int bind(const std::string& host, int port);
  // Blocks until stop().
  void listen();
  void stop();
  void wait_until_ready();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace dschat::service
