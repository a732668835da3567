#include "grounded/server/session.hpp"

#include <algorithm>
#include <future>

#include "grounded/error.hpp"
#include "grounded/memory/episodic_memory.hpp"

namespace grounded::server {

using nlohmann::json;

namespace {

bool blank(const std::string& s) {
  return std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isspace(c); });
}

}  // namespace

Session::Session(std::string id, const world::SceneSpec& spec, std::uint64_t seed) : id_(std::move(id)), seed_(seed) {
  auto gen = world::generate_scene(spec, seed);
  env_ = std::make_unique<agent::SimulatedEnvironment>(gen.scene, world::NoiseConfig{}, seed);
  agent::AgentConfig cfg;
  cfg.seed = seed;
  agent_ = std::make_unique<agent::Agent>(*env_, cfg);
  start();
}

Session::Session(std::string id, const json& saved) : id_(std::move(id)) {
  if (saved.value("v", 0) != kMessageVersion) throw FormatError("unsupported session document version");
  seed_ = saved.at("seed").get<std::uint64_t>();
  env_ = std::make_unique<agent::SimulatedEnvironment>(agent::environment_from_json(saved.at("environment")));
  agent_ = std::make_unique<agent::Agent>(*env_);
  agent_->load(saved.at("agent"));
  start();
}

void Session::start() {
  for (auto& o : env_->scene().objects) known_ids_.push_back(o.id);
  publish();
  thread_ = std::thread([this] { worker(); });
}

Session::~Session() { close(); }

void Session::close() {
  {
    std::lock_guard lk(mu_);
    if (closed_ && !thread_.joinable()) return;
    closed_ = true;
  }
  cv_.notify_all();
  if (thread_.joinable() && thread_.get_id() != std::this_thread::get_id()) thread_.join();
}

bool Session::closed() const {
  std::lock_guard lk(mu_);
  return closed_;
}

void Session::check_open() const {
  if (closed()) throw SessionClosed("session " + id_ + " is closed");
}

void Session::enqueue(std::function<void()> job) {
  {
    std::lock_guard lk(mu_);
    if (closed_) throw SessionClosed("session " + id_ + " is closed");
    queue_.push_back(std::move(job));
  }
  cv_.notify_all();
}

void Session::worker() {
  for (;;) {
    std::function<void()> job;
    {
      std::unique_lock lk(mu_);
      cv_.wait(lk, [&] { return closed_ || !queue_.empty(); });
      if (queue_.empty()) return;  // closed and drained
      job = std::move(queue_.front());
      queue_.pop_front();
      busy_ = true;
    }
    job();
    publish();
    {
      std::lock_guard lk(mu_);
      busy_ = false;
    }
    cv_.notify_all();
  }
}

void Session::publish() {
  auto d = std::make_shared<Docs>();
  d->scene = world::scene_to_json(env_->scene());
  d->stack = dialog::stack_to_json(agent_->stack());
  d->semantic = agent_->semantic_snapshot();
  d->episodic = memory::episodic_to_json(agent_->episodic());
  d->transcript = json::array();
  for (auto& l : agent_->transcript()) d->transcript.push_back(dialog::transcript_line_to_json(l));
  std::lock_guard lk(mu_);
  docs_ = std::move(d);
}

void Session::emit(const std::string& type, json payload) {
  {
    std::lock_guard lk(mu_);
    outbox_.push_back({{"v", kMessageVersion}, {"type", type}, {"seq", outbox_.size() + 1}, {"payload", std::move(payload)}});
  }
  cv_.notify_all();
}

void Session::hear(const std::string& text) {
  json in = {{"text", text}};
  if (auto c = agent_->pending_click()) in["click"] = c->str();
  emit("utterance", in);
  auto r = agent_->hear(text);
  bool moved = false;
  for (auto& m : r.moves) {
    if (m.utterance)
      emit("agent_utterance", {{"segment", m.segment},
                               {"template", language::template_info(m.utterance->tmpl).name},
                               {"bindings", m.utterance->bindings},
                               {"text", m.utterance->text}});
    if (m.action) {
      moved = true;
      emit("agent_action", {{"segment", m.segment}, {"action", *m.action}, {"text", world::describe(*m.action)}});
    }
  }
  for (auto& l : r.learned) emit("learning_event", {{"kind", dialog::learning_kind_name(l.kind)}, {"detail", l.detail}});
  if (moved) emit("scene_update", {{"scene", world::scene_to_json(env_->scene())}});
}

std::uint64_t Session::submit_utterance(const std::string& text) {
  check_open();
  if (blank(text)) return 0;
  std::uint64_t t;
  {
    std::lock_guard lk(mu_);
    t = ++tickets_;
  }
  enqueue([this, text] { hear(text); });
  return t;
}

std::uint64_t Session::select_object(const std::string& object) {
  check_open();
  auto id = world::parse_object_id(object);
  if (!id || std::find(known_ids_.begin(), known_ids_.end(), *id) == known_ids_.end())
    throw UnknownObject("no object '" + object + "' in session " + id_);
  std::uint64_t t;
  {
    std::lock_guard lk(mu_);
    t = ++tickets_;
  }
  enqueue([this, id = *id] {
    agent_->select(id);
    emit("click", {{"object", id.str()}});
  });
  return t;
}

json Session::snapshot(const std::string& kind) const {
  check_open();
  std::shared_ptr<const Docs> d;
  {
    std::lock_guard lk(mu_);
    d = docs_;
  }
  if (kind == "scene") return d->scene;
  if (kind == "stack") return d->stack;
  if (kind == "semantic") return d->semantic;
  if (kind == "episodic") return d->episodic;
  if (kind == "transcript") return d->transcript;
  throw FormatError("unknown snapshot kind '" + kind + "'");
}

json Session::save() {
  auto p = std::make_shared<std::promise<json>>();
  auto f = p->get_future();
  enqueue([this, p] {
    p->set_value({{"v", kMessageVersion},
                  {"seed", seed_},
                  {"environment", agent::environment_to_json(*env_)},
                  {"agent", agent_->save()}});
  });
  return f.get();
}

std::vector<json> Session::messages_after(std::uint64_t after, std::chrono::milliseconds wait) const {
  std::unique_lock lk(mu_);
  auto conn = connection_;
  cv_.wait_for(lk, wait, [&] { return outbox_.size() > after || closed_ || connection_ != conn; });
  if (outbox_.size() <= after) return {};
  return {outbox_.begin() + static_cast<std::ptrdiff_t>(after), outbox_.end()};
}

std::uint64_t Session::last_seq() const {
  std::lock_guard lk(mu_);
  return outbox_.size();
}

void Session::wait_idle() const {
  std::unique_lock lk(mu_);
  cv_.wait(lk, [&] { return (queue_.empty() && !busy_) || closed_; });
}

std::uint64_t Session::attach() {
  {
    std::lock_guard lk(mu_);
    if (closed_) throw SessionClosed("session " + id_ + " is closed");
    connection_ = ++connections_;
  }
  cv_.notify_all();
  return connection_;
}

void Session::detach(std::uint64_t connection) {
  std::lock_guard lk(mu_);
  if (connection_ == connection) connection_ = 0;
}

std::uint64_t Session::live_connection() const {
  std::lock_guard lk(mu_);
  return connection_;
}

Inbound inbound_from_json(const json& j) {
  if (!j.is_object()) throw FormatError("message must be an object");
  if (j.value("v", 0) != kMessageVersion) throw FormatError("unsupported message version");
  Inbound in;
  if (!j.contains("type") || !j["type"].is_string()) throw FormatError("message without type");
  in.type = j["type"];
  if (j.contains("seq")) {
    if (!j["seq"].is_number_integer() || j["seq"].get<std::int64_t>() < 0)
      throw FormatError("seq must be a non-negative integer");
    in.seq = j["seq"];
  }
  auto payload = j.value("payload", json::object());
  if (!payload.is_object()) throw FormatError("payload must be an object");
  if (in.type == "utterance") {
    if (!payload.contains("text") || !payload["text"].is_string()) throw FormatError("utterance without text");
    in.text = payload["text"];
  } else if (in.type == "click") {
    if (!payload.contains("object") || !payload["object"].is_string()) throw FormatError("click without object");
    in.object = payload["object"];
  } else {
    throw FormatError("instructors may only send utterance or click, not '" + in.type + "'");
  }
  return in;
}

}  // namespace grounded::server
