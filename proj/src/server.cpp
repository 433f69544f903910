#include "recon/server.hpp"

#include "httplib.h"

namespace recon::service {

using json = nlohmann::json;

namespace {

void send(httplib::Response& res, int status, const json& body) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

void send_error(httplib::Response& res, int status, const std::string& kind, const std::string& message,
                const json& extra = json::object()) {
  json body = extra;
  body["error"] = kind;
  body["message"] = message;
  send(res, status, body);
}

Inputs read_inputs(const httplib::Request& req) {
  auto field = [&](const char* name) {
    if (!req.has_file(name)) throw ValidationError(std::string("missing multipart field \"") + name + "\"");
    try {
      return io::parse_snapshot(req.get_file_value(name).content, io::BlobStore{});
    } catch (const ValidationError& e) {
      throw ValidationError(std::string(name) + ": " + e.what());
    }
  };
  return Inputs{field("original"), field("replica1"), field("replica2")};
}

}  // namespace

Server::Server(ServerOptions options)
    : options_(std::move(options)),
      store_(std::make_unique<SessionStore>(options_.state_dir)),
      http_(std::make_unique<httplib::Server>()) {
  routes();
}

Server::~Server() = default;

void Server::routes() {
  auto& http = *http_;
  const std::string origin = options_.cors_origin;

  http.set_post_routing_handler([origin](const httplib::Request&, httplib::Response& res) {
    res.set_header("Access-Control-Allow-Origin", origin);
    res.set_header("Vary", "Origin");
  });
  http.Options(R"(/sessions.*)", [](const httplib::Request&, httplib::Response& res) {
    res.set_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS");
    res.set_header("Access-Control-Allow-Headers", "Content-Type");
    res.status = 204;
  });
  http.set_exception_handler([](const httplib::Request&, httplib::Response& res, std::exception_ptr ep) {
    try {
      std::rethrow_exception(ep);
    } catch (const std::exception& e) {
      send_error(res, 500, "internal", e.what());
    }
  });

  // Maps library failures onto status codes.
  auto guarded = [](auto handler) {
    return [handler](const httplib::Request& req, httplib::Response& res) {
      try {
        handler(req, res);
      } catch (const StaleConflict& e) {
        send_error(res, 409, "stale_conflict", e.what(), {{"live", e.live()}});
      } catch (const NotFinished& e) {
        send_error(res, 409, "not_finished", e.what(), {{"live", e.live()}});
      } catch (const json::exception& e) {
        send_error(res, 400, "validation", std::string("bad JSON body: ") + e.what());
      } catch (const Error& e) {
        switch (e.kind()) {
          case ErrorKind::validation: send_error(res, 400, "validation", e.what()); break;
          case ErrorKind::usage: send_error(res, 400, "usage", e.what()); break;
          case ErrorKind::bound: send_error(res, 413, "bound", e.what()); break;
          default: send_error(res, 500, "internal", e.what()); break;
        }
      }
    };
  };

  auto session_of = [this](const httplib::Request& req, httplib::Response& res) -> std::shared_ptr<Session> {
    auto s = store_->find(req.path_params.at("id"));
    if (!s) send_error(res, 404, "not_found", "no session " + req.path_params.at("id"));
    return s;
  };

  http.Post("/sessions", guarded([this](const httplib::Request& req, httplib::Response& res) {
              auto s = store_->create(read_inputs(req));
              std::lock_guard lock(s->mutex());
              send(res, 201, s->summary());
            }));

  http.Get("/sessions", guarded([this](const httplib::Request&, httplib::Response& res) {
             send(res, 200, {{"sessions", store_->ids()}});
           }));

  http.Get("/sessions/:id", guarded([session_of](const httplib::Request& req, httplib::Response& res) {
             auto s = session_of(req, res);
             if (!s) return;
             std::lock_guard lock(s->mutex());
             send(res, 200, s->summary());
           }));

  http.Post("/sessions/:id/resolve", guarded([this, session_of](const httplib::Request& req, httplib::Response& res) {
              auto s = session_of(req, res);
              if (!s) return;
              const auto body = json::parse(req.body);
              const auto id = body.at("conflict_id").get<std::size_t>();
              const Side winner = parse_side(body.at("winner").get<std::string>());
              std::lock_guard lock(s->mutex());
              auto delta = s->resolve(id, winner);
              store_->record_resolve(*s, {id, winner});
              send(res, 200, delta);
            }));

  http.Post("/sessions/:id/undo", guarded([this, session_of](const httplib::Request& req, httplib::Response& res) {
              auto s = session_of(req, res);
              if (!s) return;
              std::lock_guard lock(s->mutex());
              const bool undone = s->undo();
              if (undone) store_->record_undo(*s);
              auto body = s->summary();
              body["undone"] = undone;
              send(res, 200, body);
            }));

  http.Get("/sessions/:id/plan", guarded([session_of](const httplib::Request& req, httplib::Response& res) {
             auto s = session_of(req, res);
             if (!s) return;
             std::lock_guard lock(s->mutex());
             send(res, 200, s->plan_json());
           }));

  if (options_.ui_dir) http.set_mount_point("/", options_.ui_dir->string());
}

int Server::bind() {
  if (options_.port == 0) {
    const int port = http_->bind_to_any_port(options_.host);
    if (port < 0) throw UsageError("cannot bind " + options_.host);
    options_.port = port;
    return port;
  }
  if (!http_->bind_to_port(options_.host, options_.port))
    throw UsageError("cannot bind " + options_.host + ":" + std::to_string(options_.port));
  return options_.port;
}

void Server::run() { http_->listen_after_bind(); }

void Server::stop() { http_->stop(); }

}  // namespace recon::service
