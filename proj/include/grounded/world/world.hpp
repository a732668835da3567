#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "grounded/geometry.hpp"
#include "grounded/perception/features.hpp"
#include "json.hpp"

namespace grounded::world {

struct ObjectId {
  int value = 0;
  auto operator<=>(const ObjectId&) const = default;
  std::string str() const { return "o" + std::to_string(value); }
};

std::optional<ObjectId> parse_object_id(const std::string& s);

using Rgb = std::array<double, 3>;

struct WorldObject {
  ObjectId id;
  Vec3 pose;
  Vec3 bbox;  // width, depth, height
  Rgb color{};
  double size_class = 0;
  std::array<double, 3> shape_descriptor{};
  bool graspable = true;

  Box box() const { return {pose, bbox}; }
  bool operator==(const WorldObject&) const = default;
};

struct Rect {
  double x0 = 0, y0 = 0, x1 = 0, y1 = 0;
  bool operator==(const Rect&) const = default;
};

struct NamedLocation {
  std::string name;
  Rect region;

  // regions are z-thin boxes lying on the table
  Box box() const {
    return {{(region.x0 + region.x1) / 2, (region.y0 + region.y1) / 2, 0},
            {region.x1 - region.x0, region.y1 - region.y0, 0}};
  }
  bool operator==(const NamedLocation&) const = default;
};

struct ArmState {
  std::optional<ObjectId> holding;
  bool empty() const { return !holding; }
  bool operator==(const ArmState&) const = default;
};

struct PointedAt {
  ObjectId id;
  std::uint64_t tick = 0;
  bool operator==(const PointedAt&) const = default;
};

struct Scene {
  Workspace workspace;
  std::vector<WorldObject> objects;
  std::vector<NamedLocation> locations;
  ArmState arm;
  std::uint64_t tick = 0;
  std::optional<PointedAt> pointed;

  const WorldObject* find(ObjectId id) const;
  WorldObject* find(ObjectId id);
  const WorldObject& at(ObjectId id) const;  // throws UnknownObject
  const NamedLocation* location(const std::string& name) const;
  std::optional<ObjectId> pointed_now() const;
  bool operator==(const Scene&) const = default;
};

struct PointTo {
  ObjectId id;
  bool operator==(const PointTo&) const = default;
};
struct PickUp {
  ObjectId id;
  bool operator==(const PickUp&) const = default;
};
struct PutDown {
  double x = 0, y = 0;
  bool operator==(const PutDown&) const = default;
};
using PrimitiveAction = std::variant<PointTo, PickUp, PutDown>;

std::string describe(const PrimitiveAction& a);

// height at which the gripper carries objects, as a fraction of workspace height
inline constexpr double kGripperFraction = 0.9;

// footprints closer than this are treated as touching, not overlapping
inline constexpr double kContactEps = 1e-9;

Scene apply_action(Scene scene, const PrimitiveAction& action);

struct NoiseConfig {
  double color = 0.02;
  double size = 0.02;
  double shape = 0.08;
  bool operator==(const NoiseConfig&) const = default;
};

struct ObjectPercept {
  ObjectId id;
  Vec3 pose;
  Vec3 bbox;
  perception::FeatureVector color;
  perception::FeatureVector size;
  perception::FeatureVector shape;

  Box box() const { return {pose, bbox}; }
  const perception::FeatureVector& features(perception::PropertyKind p) const;
  bool operator==(const ObjectPercept&) const = default;
};

std::vector<ObjectPercept> observe(const Scene& scene, const NoiseConfig& noise,
                                   std::uint64_t noise_seed);

// objects resting directly or indirectly on `id`
bool is_clear(const Scene& scene, ObjectId id);

// resting z for a footprint centred at (x,y); throws PlacementBlocked
double resting_z(const Scene& scene, ObjectId moving, double x, double y);

std::vector<NamedLocation> default_locations(const Workspace& ws);

void to_json(nlohmann::json& j, const ObjectId& id);
void from_json(const nlohmann::json& j, ObjectId& id);
void to_json(nlohmann::json& j, const PrimitiveAction& a);
void from_json(const nlohmann::json& j, PrimitiveAction& a);
nlohmann::json scene_to_json(const Scene& s);
Scene scene_from_json(const nlohmann::json& j);
nlohmann::json percept_to_json(const ObjectPercept& p);

}  // namespace grounded::world
