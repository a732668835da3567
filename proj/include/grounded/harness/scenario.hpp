#pragma once

#include <optional>
#include <string>
#include <vector>

#include "grounded/world/scene_spec.hpp"
#include "json.hpp"

namespace grounded::harness {

// what a step must produce; unset fields are not checked
struct StepExpect {
  std::optional<std::vector<std::string>> said;
  std::optional<std::string> last;
  std::optional<std::vector<std::string>> stack;
  std::vector<std::string> learned;  // prefixes, e.g. "word-map orange"
  std::optional<int> actions;
  std::optional<int> word_segments;  // agent-opened word segments in this step
};

struct ScenarioStep {
  std::string say;
  std::optional<world::ObjectId> click;
  StepExpect expect;
};

struct RegionCheck {
  world::ObjectId object;
  std::string location;
};

struct Scenario {
  int version = 1;
  std::string name;
  world::SceneSpec scene;
  std::uint64_t seed = 1;
  std::vector<ScenarioStep> steps;
  // final state
  std::optional<std::vector<std::string>> stack;
  std::vector<RegionCheck> in_region;
  std::optional<int> rules;
  std::vector<std::string> learned;
};

Scenario scenario_from_json(const nlohmann::json& j);
Scenario load_scenario(const std::string& path);

// one entry per step: what was said and clicked, and everything that came back
nlohmann::json run_scenario(const Scenario& s);

}  // namespace grounded::harness
