#include "grounded/server/server.hpp"

#include <sstream>

#include "grounded/error.hpp"
#include "httplib.h"

namespace grounded::server {

using nlohmann::json;

std::shared_ptr<Session> Registry::create(const json& request) {
  std::string id;
  {
    std::lock_guard lk(mu_);
    id = "s" + std::to_string(++next_);
  }
  std::shared_ptr<Session> s;
  if (request.contains("state")) {
    s = std::make_shared<Session>(id, request["state"]);
  } else {
    world::SceneSpec spec;
    if (request.contains("scene")) spec = world::scene_spec_from_json(request["scene"]);
    auto seed = request.value("seed", spec.seed ? spec.seed : std::uint64_t{1});
    s = std::make_shared<Session>(id, spec, seed);
  }
  std::lock_guard lk(mu_);
  sessions_[id] = s;
  return s;
}

std::shared_ptr<Session> Registry::find(const std::string& id) const {
  std::lock_guard lk(mu_);
  auto it = sessions_.find(id);
  if (it == sessions_.end() || it->second->closed()) throw SessionClosed("no live session '" + id + "'");
  return it->second;
}

void Registry::close(const std::string& id) {
  std::shared_ptr<Session> s;
  {
    std::lock_guard lk(mu_);
    auto it = sessions_.find(id);
    if (it == sessions_.end()) throw SessionClosed("no live session '" + id + "'");
    s = it->second;
  }
  s->close();
}

namespace {

void reply(httplib::Response& res, int status, const json& body) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

void error(httplib::Response& res, int status, const std::string& msg) { reply(res, status, {{"error", msg}}); }

json parse_body(const httplib::Request& req) {
  if (req.body.empty()) return json::object();
  try {
    return json::parse(req.body);
  } catch (const json::exception& e) {
    throw FormatError(std::string("bad json: ") + e.what());
  }
}

// maps library errors onto status codes
template <class F>
void guarded(httplib::Response& res, F&& f) {
  try {
    f();
  } catch (const SessionClosed& e) {
    error(res, 410, e.what());
  } catch (const UnknownObject& e) {
    error(res, 404, e.what());
  } catch (const FormatError& e) {
    error(res, 400, e.what());
  } catch (const json::exception& e) {
    error(res, 400, e.what());
  } catch (const std::exception& e) {
    error(res, 500, e.what());
  }
}

std::uint64_t after_param(const httplib::Request& req) {
  if (!req.has_param("after")) return 0;
  try {
    return std::stoull(req.get_param_value("after"));
  } catch (const std::exception&) {
    throw FormatError("after must be a non-negative integer");
  }
}

}  // namespace

Server::Server(ServerOptions opts) : opts_(std::move(opts)), http_(std::make_unique<httplib::Server>()) { routes(); }

Server::~Server() { stop(); }

void Server::routes() {
  auto& h = *http_;

  h.Post("/session", [this](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] {
      auto s = registry_.create(parse_body(req));
      reply(res, 201, {{"v", kMessageVersion}, {"id", s->id()}, {"seed", s->seed()}});
    });
  });

  h.Delete(R"(/session/([^/]+))", [this](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] {
      registry_.close(req.matches[1]);
      reply(res, 200, {{"v", kMessageVersion}, {"closed", std::string(req.matches[1])}});
    });
  });

  h.Get(R"(/session/([^/]+)/snapshot/([a-z]+))", [this](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] { reply(res, 200, registry_.find(req.matches[1])->snapshot(req.matches[2])); });
  });

  h.Post(R"(/session/([^/]+)/save)", [this](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] { reply(res, 200, registry_.find(req.matches[1])->save()); });
  });

  // instructor to agent: one message or newline-separated messages
  h.Post(R"(/session/([^/]+)/messages)", [this](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] {
      auto s = registry_.find(req.matches[1]);
      std::vector<Inbound> msgs;
      std::istringstream lines(req.body);
      std::string line;
      while (std::getline(lines, line)) {
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        try {
          msgs.push_back(inbound_from_json(json::parse(line)));
        } catch (const json::exception& e) {
          throw FormatError(std::string("bad json: ") + e.what());
        }
      }
      json acks = json::array();
      for (auto& m : msgs) {
        auto ticket = m.type == "utterance" ? s->submit_utterance(m.text) : s->select_object(m.object);
        acks.push_back({{"seq", m.seq}, {"ticket", ticket}});
      }
      reply(res, 202, {{"v", kMessageVersion}, {"acks", acks}});
    });
  });

  // agent to instructor, polled: messages after a seq, waiting briefly for the first
  h.Get(R"(/session/([^/]+)/messages)", [this](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] {
      auto s = registry_.find(req.matches[1]);
      int wait = req.has_param("wait_ms") ? std::stoi(req.get_param_value("wait_ms")) : 0;
      reply(res, 200, s->messages_after(after_param(req), std::chrono::milliseconds(std::clamp(wait, 0, 30000))));
    });
  });

  // agent to instructor, streamed as NDJSON for as long as the connection lives
  h.Get(R"(/session/([^/]+)/stream)", [this](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] {
      auto s = registry_.find(req.matches[1]);
      auto cursor = std::make_shared<std::uint64_t>(after_param(req));
      auto conn = s->attach();
      auto poll = std::chrono::milliseconds(opts_.poll_ms);
      res.set_chunked_content_provider(
          "application/x-ndjson",
          [s, cursor, poll, conn](std::size_t, httplib::DataSink& sink) {
            // closed, or replaced by a newer connection
            if (s->closed() || s->live_connection() != conn) {
              sink.done();
              return true;
            }
            if (!sink.is_writable()) return false;
            for (auto& m : s->messages_after(*cursor, poll)) {
              auto line = m.dump() + "\n";
              if (!sink.write(line.data(), line.size())) return false;
              *cursor = m.at("seq").get<std::uint64_t>();
            }
            return true;
          },
          [s, conn](bool) { s->detach(conn); });
    });
  });
}

bool Server::run() { return bind() >= 0 && listen_after_bind(); }

int Server::bind() {
  if (opts_.port == 0) return opts_.port = http_->bind_to_any_port(opts_.host);
  return http_->bind_to_port(opts_.host, opts_.port) ? opts_.port : -1;
}

bool Server::listen_after_bind() { return http_->listen_after_bind(); }

void Server::stop() {
  if (http_ && http_->is_running()) http_->stop();
}

}  // namespace grounded::server
