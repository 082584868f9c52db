#include "dschat/service/server.hpp"

#include <httplib.h>

#include "dschat/util/text.hpp"

namespace dschat::service {

int http_status(ErrorCategory category) {
  switch (category) {
    case ErrorCategory::validation: return 422;
    case ErrorCategory::upstream: return 502;
    case ErrorCategory::not_found: return 404;
    case ErrorCategory::conflict: return 409;
  }
  return 500;
}

Json error_body(const std::string& code, const std::string& message) {
  return {{"error", {{"code", code}, {"message", message}}}};
}

namespace {

void send_json(httplib::Response& res, int status, const Json& body) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

std::string message_text(const std::string& body) {
  Json j;
  try {
    j = Json::parse(body);
  } catch (const Json::parse_error&) {
    throw ValidationError("MalformedBody", "message body must be a JSON object with a text field");
  }
  if (!j.is_object()) throw ValidationError("MalformedBody", "message body must be a JSON object");
  for (const char* key : {"text", "message", "utterance"}) {
    if (j.contains(key)) {
      if (!j[key].is_string()) throw ValidationError("MalformedBody", std::string(key) + " must be a string");
      return j[key].get<std::string>();
    }
  }
  throw ValidationError("MalformedBody", "message body needs a text field");
}

}  // namespace

struct Server::Impl {
  std::shared_ptr<dialogue::SessionManager> manager;
  ServerOptions options;
  httplib::Server http;

  // Maps engine errors onto status codes.
  template <typename Fn>
  void guarded(httplib::Response& res, Fn&& fn) {
    try {
      fn();
    } catch (const Error& e) {
      send_json(res, http_status(e.category()), error_body(e.code(), e.what()));
    } catch (const std::exception& e) {
      send_json(res, 500, error_body("Internal", e.what()));
    }
  }

  void routes() {
    http.new_task_queue = [n = options.threads] { return new httplib::ThreadPool(static_cast<std::size_t>(n)); };

    http.set_pre_routing_handler([this](const httplib::Request& req, httplib::Response& res) {
      res.set_header("Access-Control-Allow-Origin", options.cors_origin);
      res.set_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS");
      res.set_header("Access-Control-Allow-Headers", "Content-Type, Authorization");
      if (req.method == "OPTIONS") {
        res.status = 204;
        return httplib::Server::HandlerResponse::Handled;
      }
      if (!options.bearer_token.empty() && req.path != "/v1/health" &&
          req.get_header_value("Authorization") != "Bearer " + options.bearer_token) {
        res.set_header("WWW-Authenticate", "Bearer");
        send_json(res, 401, error_body("Unauthorized", "missing or wrong bearer token"));
        return httplib::Server::HandlerResponse::Handled;
      }
      return httplib::Server::HandlerResponse::Unhandled;
    });

    http.Get("/v1/health", [](const httplib::Request&, httplib::Response& res) {
      send_json(res, 200, {{"status", "ok"}});
    });

    http.Post("/v1/sessions", [this](const httplib::Request&, httplib::Response& res) {
      guarded(res, [&] {
        const auto id = manager->create();
        send_json(res, 201, {{"session_id", id}, {"state", "data_visualization"}});
      });
    });

    http.Get("/v1/sessions", [this](const httplib::Request&, httplib::Response& res) {
      guarded(res, [&] { send_json(res, 200, {{"sessions", manager->ids()}}); });
    });

    http.Post(R"(/v1/sessions/([^/]+)/dataset)", [this](const httplib::Request& req, httplib::Response& res) {
      guarded(res, [&] {
        const std::string name = req.has_param("name") ? req.get_param_value("name") : "dataset";
        send_json(res, 200, manager->upload(req.matches[1], req.body, name).to_json());
      });
    });

    http.Post(R"(/v1/sessions/([^/]+)/messages)", [this](const httplib::Request& req, httplib::Response& res) {
      guarded(res, [&] {
        const std::string id = req.matches[1];
        manager->get(id);  // 404 before 422
        send_json(res, 200, manager->post_message(id, message_text(req.body)).to_json());
      });
    });

    http.Get(R"(/v1/sessions/([^/]+)/results)", [this](const httplib::Request& req, httplib::Response& res) {
      guarded(res, [&] { send_json(res, 200, manager->results(req.matches[1]).to_json()); });
    });

    http.Get(R"(/v1/sessions/([^/]+))", [this](const httplib::Request& req, httplib::Response& res) {
      guarded(res, [&] { send_json(res, 200, dialogue::session_record(manager->get(req.matches[1]))); });
    });

    http.set_error_handler([](const httplib::Request& req, httplib::Response& res) {
      if (!res.body.empty()) return;
      if (res.status == 404) send_json(res, 404, error_body("NoRoute", "no route for " + req.method + " " + req.path));
    });
  }
};

Server::Server(std::shared_ptr<dialogue::SessionManager> manager, ServerOptions options)
    : impl_(std::make_unique<Impl>()) {
  impl_->manager = std::move(manager);
  impl_->options = std::move(options);
  impl_->routes();
}

Server::~Server() { stop(); }

int Server::bind(const std::string& host, int port) {
  if (port == 0) {
    const int p = impl_->http.bind_to_any_port(host);
    if (p < 0) throw UpstreamError("BindFailed", "cannot bind " + host);
    return p;
  }
  if (!impl_->http.bind_to_port(host, port)) {
    throw UpstreamError("BindFailed", "cannot bind " + host + ":" + std::to_string(port));
  }
  return port;
}

void Server::listen() { impl_->http.listen_after_bind(); }

void Server::stop() {
  if (impl_) impl_->http.stop();
}

void Server::wait_until_ready() { impl_->http.wait_until_ready(); }

}  // namespace dschat::service
