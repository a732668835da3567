#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "grounded/world/world.hpp"
#include "json.hpp"

namespace grounded::world {

struct PaletteColor {
  std::string name;
  Rgb rgb{};
};
struct PaletteSize {
  std::string name;
  double scale = 0.1;  // edge length of the object's bbox
};
struct PaletteShape {
  std::string name;
  std::array<double, 3> descriptor{};
};

struct Palette {
  std::vector<PaletteColor> colors;
  std::vector<PaletteSize> sizes;
  std::vector<PaletteShape> shapes;
};

// "*" draws the attribute at random from the palette
struct ObjectSpec {
  std::string color = "*", size = "*", shape = "*";
  std::optional<std::array<double, 2>> pose;
  bool graspable = true;
};

Palette default_palette();

struct SceneSpec {
  int version = 1;
  Workspace workspace;
  Palette palette = default_palette();
  std::vector<ObjectSpec> objects;
  std::optional<std::vector<NamedLocation>> locations;
  // per-object spread of shape descriptors around the palette value, and the
  // minimum descriptor distance kept between objects of different shapes
  double shape_variation = 0;
  double shape_separation = 0;
  std::uint64_t seed = 0;
};

struct TruthLabels {
  std::string color, size, shape;
  bool operator==(const TruthLabels&) const = default;
};

struct GeneratedScene {
  Scene scene;
  std::map<ObjectId, TruthLabels> truth;
};

GeneratedScene generate_scene(const SceneSpec& spec, std::uint64_t seed);

SceneSpec scene_spec_from_json(const nlohmann::json& j);
nlohmann::json scene_spec_to_json(const SceneSpec& s);

}  // namespace grounded::world
