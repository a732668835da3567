#pragma once

#include <optional>
#include <string>
#include <vector>

#include "grounded/memory/episodic_memory.hpp"
#include "grounded/world/world.hpp"

namespace grounded::agent {

struct SimObject {
  world::ObjectId id;
  Vec3 pose;
  Vec3 bbox;
  bool graspable = true;

  Box box() const { return {pose, bbox}; }
  bool operator==(const SimObject&) const = default;
};

// the agent's own picture of the table, enough to predict primitive actions
struct SimState {
  Workspace ws;
  std::vector<SimObject> objects;
  std::optional<world::ObjectId> holding;

  const SimObject* find(world::ObjectId id) const;
  bool operator==(const SimState&) const = default;
};

SimState sim_from_scene(const world::Scene& s);
SimState sim_from_percepts(const std::vector<world::ObjectPercept>& ps, std::optional<world::ObjectId> holding,
                           const Workspace& ws);
SimState sim_from_episode(const memory::EpisodeSnapshot& e, const Workspace& ws);

namespace action_model {

inline constexpr double kGripHeight = 0.9;  // of workspace height

bool clear(const SimState& s, world::ObjectId id);
// empty when applicable, otherwise the reason
std::optional<std::string> blocked(const SimState& s, const world::PrimitiveAction& a);
// throws the same error kinds as the world
SimState apply(SimState s, const world::PrimitiveAction& a);

}  // namespace action_model

}  // namespace grounded::agent
