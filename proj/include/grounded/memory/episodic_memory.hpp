#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "grounded/world/world.hpp"
#include "json.hpp"

namespace grounded::memory {

struct PerceptSnapshot {
  world::ObjectId id;
  Vec3 pose;
  Vec3 bbox;
  std::array<std::optional<std::string>, 3> symbols;  // color, size, shape; empty = Unknown
  bool operator==(const PerceptSnapshot&) const = default;
};

struct EpisodeSnapshot {
  std::vector<PerceptSnapshot> objects;
  std::optional<world::ObjectId> holding;
  std::string top_segment;  // id, empty when the stack is empty
  std::string top_purpose;
  std::optional<world::PrimitiveAction> action;
  std::optional<std::string> instructor_utterance;
  std::optional<std::string> agent_utterance;
  std::uint64_t world_tick = 0;

  const PerceptSnapshot* find(world::ObjectId id) const;
  bool operator==(const EpisodeSnapshot&) const = default;
};

struct Episode {
  std::uint64_t index = 0;
  EpisodeSnapshot snapshot;
  bool operator==(const Episode&) const = default;
};

class EpisodicMemory {
 public:
  std::uint64_t record(EpisodeSnapshot s);
  const Episode& get(std::uint64_t index) const;
  std::vector<Episode> span(std::uint64_t from, std::uint64_t to) const;
  std::optional<std::uint64_t> most_recent_with_purpose(const std::string& purpose) const;
  std::size_t size() const { return log_.size(); }
  // index the next record() will return
  std::uint64_t next_index() const { return log_.size() + 1; }
  const std::vector<Episode>& all() const { return log_; }
  bool operator==(const EpisodicMemory&) const = default;

 private:
  std::vector<Episode> log_;
};

nlohmann::json episode_to_json(const Episode& e);
Episode episode_from_json(const nlohmann::json& j);
nlohmann::json episodic_to_json(const EpisodicMemory& m);
EpisodicMemory episodic_from_json(const nlohmann::json& j);

}  // namespace grounded::memory
