#include "grounded/memory/episodic_memory.hpp"

#include "grounded/error.hpp"

namespace grounded::memory {

const PerceptSnapshot* EpisodeSnapshot::find(world::ObjectId id) const {
  for (auto& o : objects)
    if (o.id == id) return &o;
  return nullptr;
}

std::uint64_t EpisodicMemory::record(EpisodeSnapshot s) {
  std::uint64_t index = log_.size() + 1;
  log_.push_back({index, std::move(s)});
  return index;
}

const Episode& EpisodicMemory::get(std::uint64_t index) const {
  if (index < 1 || index > log_.size())
    throw IndexOutOfRange("no episode " + std::to_string(index) + " (have " + std::to_string(log_.size()) + ")");
  return log_[index - 1];
}

std::vector<Episode> EpisodicMemory::span(std::uint64_t from, std::uint64_t to) const {
  if (from > to) throw IndexOutOfRange("empty episode span");
  get(from);
  get(to);
  return {log_.begin() + (from - 1), log_.begin() + to};
}

std::optional<std::uint64_t> EpisodicMemory::most_recent_with_purpose(const std::string& purpose) const {
  for (auto it = log_.rbegin(); it != log_.rend(); ++it)
    if (it->snapshot.top_purpose == purpose) return it->index;
  return std::nullopt;
}

namespace {
nlohmann::json vec(const Vec3& v) { return {v.x, v.y, v.z}; }
Vec3 vec(const nlohmann::json& j) { return {j.at(0), j.at(1), j.at(2)}; }
template <class T>
nlohmann::json opt(const std::optional<T>& v) {
  return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
}
}  // namespace

nlohmann::json episode_to_json(const Episode& e) {
  auto& s = e.snapshot;
  nlohmann::json objs = nlohmann::json::array();
  for (auto& o : s.objects) {
    nlohmann::json syms = nlohmann::json::array();
    for (auto& sym : o.symbols) syms.push_back(opt(sym));
    objs.push_back({{"id", o.id}, {"pose", vec(o.pose)}, {"bbox", vec(o.bbox)}, {"symbols", syms}});
  }
  return {{"index", e.index},
          {"objects", objs},
          {"holding", opt(s.holding)},
          {"top_segment", s.top_segment},
          {"top_purpose", s.top_purpose},
          {"action", opt(s.action)},
          {"instructor_utterance", opt(s.instructor_utterance)},
          {"agent_utterance", opt(s.agent_utterance)},
          {"world_tick", s.world_tick}};
}

Episode episode_from_json(const nlohmann::json& j) {
  Episode e;
  e.index = j.at("index");
  auto& s = e.snapshot;
  for (auto& o : j.at("objects")) {
    PerceptSnapshot p;
    p.id = o.at("id").get<world::ObjectId>();
    p.pose = vec(o.at("pose"));
    p.bbox = vec(o.at("bbox"));
    for (int k = 0; k < 3; ++k)
      if (!o.at("symbols").at(k).is_null()) p.symbols[k] = o.at("symbols").at(k).get<std::string>();
    s.objects.push_back(p);
  }
  if (!j.at("holding").is_null()) s.holding = j.at("holding").get<world::ObjectId>();
  s.top_segment = j.at("top_segment");
  s.top_purpose = j.at("top_purpose");
  if (!j.at("action").is_null()) s.action = j.at("action").get<world::PrimitiveAction>();
  if (!j.at("instructor_utterance").is_null()) s.instructor_utterance = j.at("instructor_utterance").get<std::string>();
  if (!j.at("agent_utterance").is_null()) s.agent_utterance = j.at("agent_utterance").get<std::string>();
  s.world_tick = j.at("world_tick");
  return e;
}

nlohmann::json episodic_to_json(const EpisodicMemory& m) {
  nlohmann::json out = nlohmann::json::array();
  for (auto& e : m.all()) out.push_back(episode_to_json(e));
  return out;
}

EpisodicMemory episodic_from_json(const nlohmann::json& j) {
  EpisodicMemory m;
  for (auto& e : j) {
    auto ep = episode_from_json(e);
    if (m.record(ep.snapshot) != ep.index) throw FormatError("episode indices not contiguous");
  }
  return m;
}

}  // namespace grounded::memory
