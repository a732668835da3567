#include "grounded/agent/environment.hpp"

namespace grounded::agent {

namespace {
std::uint64_t mix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}
}  // namespace

SimulatedEnvironment::SimulatedEnvironment(world::Scene scene, world::NoiseConfig noise, std::uint64_t noise_seed)
    : scene_(std::move(scene)), noise_(noise), noise_seed_(noise_seed) {}

std::vector<world::ObjectPercept> SimulatedEnvironment::observe() {
  // fresh sensor noise on every look
  return world::observe(scene_, noise_, mix(noise_seed_ + observations_++));
}

void SimulatedEnvironment::act(const world::PrimitiveAction& a) { scene_ = world::apply_action(scene_, a); }

nlohmann::json environment_to_json(const SimulatedEnvironment& e) {
  return {{"scene", world::scene_to_json(e.scene_)},
          {"noise", {{"color", e.noise_.color}, {"size", e.noise_.size}, {"shape", e.noise_.shape}}},
          {"noise_seed", e.noise_seed_},
          {"observations", e.observations_}};
}

SimulatedEnvironment environment_from_json(const nlohmann::json& j) {
  auto& n = j.at("noise");
  SimulatedEnvironment e(world::scene_from_json(j.at("scene")),
                         {n.at("color").get<double>(), n.at("size").get<double>(), n.at("shape").get<double>()},
                         j.at("noise_seed").get<std::uint64_t>());
  e.observations_ = j.at("observations");
  return e;
}

}  // namespace grounded::agent
