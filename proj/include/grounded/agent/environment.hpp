#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "grounded/world/world.hpp"
#include "json.hpp"

namespace grounded::agent {

// what the agent can see and do; the instructor's clicks arrive separately
class Environment {
 public:
  virtual ~Environment() = default;
  virtual std::vector<world::ObjectPercept> observe() = 0;
  virtual void act(const world::PrimitiveAction& a) = 0;
  virtual std::optional<world::ObjectId> holding() const = 0;
  virtual const std::vector<world::NamedLocation>& locations() const = 0;
  virtual Workspace workspace() const = 0;
  virtual std::uint64_t tick() const = 0;
  virtual bool exists(world::ObjectId id) const = 0;
};

class SimulatedEnvironment : public Environment {
 public:
  explicit SimulatedEnvironment(world::Scene scene, world::NoiseConfig noise = {}, std::uint64_t noise_seed = 0);

  std::vector<world::ObjectPercept> observe() override;
  void act(const world::PrimitiveAction& a) override;
  std::optional<world::ObjectId> holding() const override { return scene_.arm.holding; }
  const std::vector<world::NamedLocation>& locations() const override { return scene_.locations; }
  Workspace workspace() const override { return scene_.workspace; }
  std::uint64_t tick() const override { return scene_.tick; }
  bool exists(world::ObjectId id) const override { return scene_.find(id) != nullptr; }

  const world::Scene& scene() const { return scene_; }
  // instructor-side rearrangement, outside the agent's action stream
  world::Scene& scene_mut() { return scene_; }
  std::uint64_t observations() const { return observations_; }

  bool operator==(const SimulatedEnvironment& o) const {
    return scene_ == o.scene_ && noise_ == o.noise_ && noise_seed_ == o.noise_seed_ && observations_ == o.observations_;
  }

  friend nlohmann::json environment_to_json(const SimulatedEnvironment& e);
  friend SimulatedEnvironment environment_from_json(const nlohmann::json& j);

 private:
  world::Scene scene_;
  world::NoiseConfig noise_;
  std::uint64_t noise_seed_ = 0;
  std::uint64_t observations_ = 0;
};

nlohmann::json environment_to_json(const SimulatedEnvironment& e);
SimulatedEnvironment environment_from_json(const nlohmann::json& j);

}  // namespace grounded::agent
