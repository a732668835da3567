#pragma once

#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <deque>
#include <functional>
#include <memory>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include "grounded/agent/agent.hpp"
#include "grounded/world/scene_spec.hpp"
#include "json.hpp"

namespace grounded::server {

constexpr int kMessageVersion = 1;

// one live agent and its world; every mutation runs on the session's worker
// thread in submission order, reads see the state as of the last finished job
class Session {
 public:
  Session(std::string id, const world::SceneSpec& spec, std::uint64_t seed);
  // from a document produced by save()
  Session(std::string id, const nlohmann::json& saved);
  ~Session();
  Session(const Session&) = delete;
  Session& operator=(const Session&) = delete;

  const std::string& id() const { return id_; }
  std::uint64_t seed() const { return seed_; }

  // both return a ticket numbering the input; an empty utterance gets 0 and
  // is dropped
  std::uint64_t submit_utterance(const std::string& text);
  std::uint64_t select_object(const std::string& object);

  // kind: scene|stack|semantic|episodic|transcript
  nlohmann::json snapshot(const std::string& kind) const;
  nlohmann::json save();

  // outbound messages with seq > after, waiting up to `wait` for the first
  std::vector<nlohmann::json> messages_after(std::uint64_t after, std::chrono::milliseconds wait) const;
  std::uint64_t last_seq() const;

  void wait_idle() const;
  void close();
  bool closed() const;

  // a single instructor connection at a time: a new one takes over and the
  // previous one sees live_connection() change
  std::uint64_t attach();
  void detach(std::uint64_t connection);
  std::uint64_t live_connection() const;

 private:
  struct Docs {
    nlohmann::json scene, stack, semantic, episodic, transcript;
  };

  void start();
  void enqueue(std::function<void()> job);
  void worker();
  void publish();
  void emit(const std::string& type, nlohmann::json payload);
  void hear(const std::string& text);
  void check_open() const;

  std::string id_;
  std::uint64_t seed_ = 0;
  std::unique_ptr<agent::SimulatedEnvironment> env_;
  std::unique_ptr<agent::Agent> agent_;
  std::vector<world::ObjectId> known_ids_;

  mutable std::mutex mu_;
  mutable std::condition_variable cv_;
  std::deque<std::function<void()>> queue_;
  bool busy_ = false;
  bool closed_ = false;
  std::uint64_t connection_ = 0, connections_ = 0;
  std::uint64_t tickets_ = 0;
  std::vector<nlohmann::json> outbox_;
  std::shared_ptr<const Docs> docs_;
  std::thread thread_;
};

// a message from the instructor side of the channel; throws FormatError
struct Inbound {
  std::string type;  // utterance | click
  std::uint64_t seq = 0;
  std::string text;    // utterance
  std::string object;  // click
};
Inbound inbound_from_json(const nlohmann::json& j);

}  // namespace grounded::server
