#pragma once

#include <map>
#include <memory>
#include <mutex>
#include <string>

#include "grounded/server/session.hpp"

namespace httplib {
class Server;
}

namespace grounded::server {

// sessions by id; ids are "s1", "s2", ...
class Registry {
 public:
  std::shared_ptr<Session> create(const nlohmann::json& request);
  std::shared_ptr<Session> find(const std::string& id) const;  // throws SessionClosed
  void close(const std::string& id);

 private:
  mutable std::mutex mu_;
  std::map<std::string, std::shared_ptr<Session>> sessions_;
  int next_ = 0;
};

struct ServerOptions {
  std::string host = "127.0.0.1";
  int port = 8080;  // 0 picks a free port
  int poll_ms = 250;
};

class Server {
 public:
  explicit Server(ServerOptions opts = {});
  ~Server();

  // binds, then serves on the calling thread until stop()
  bool run();
  // binds only; returns the bound port or -1
  int bind();
  bool listen_after_bind();
  void stop();

  Registry& registry() { return registry_; }

 private:
  void routes();

  ServerOptions opts_;
  Registry registry_;
  std::unique_ptr<httplib::Server> http_;
};

}  // namespace grounded::server
