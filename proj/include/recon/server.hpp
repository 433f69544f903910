#pragma once

// HTTP+JSON front of the session store.
//
//   POST /sessions                 multipart fields original, replica1, replica2
//   GET  /sessions/{id}            graph and state
//   POST /sessions/{id}/resolve    {"conflict_id": n, "winner": "a" | "b"}
//   POST /sessions/{id}/undo
//   GET  /sessions/{id}/plan

#include <filesystem>
#include <memory>
#include <optional>
#include <string>

#include "recon/session.hpp"

namespace httplib {
class Server;
}

namespace recon::service {

struct ServerOptions {
  std::string host = "127.0.0.1";
  int port = 8080;  // 0 picks a free port
  std::string cors_origin = "http://localhost:5173";
  std::optional<std::filesystem::path> state_dir;
  std::optional<std::filesystem::path> ui_dir;
};

class Server {
 public:
  explicit Server(ServerOptions options);
  ~Server();

  /// Binds the socket; returns the bound port.
  int bind();
  /// Serves until stop(); call bind() first.
  void run();
  void stop();

  SessionStore& store() noexcept { return *store_; }

 private:
  void routes();

  ServerOptions options_;
  std::unique_ptr<SessionStore> store_;
  std::unique_ptr<httplib::Server> http_;
};

}  // namespace recon::service
