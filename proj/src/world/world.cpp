#include "grounded/world/world.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "grounded/error.hpp"

namespace grounded::world {

namespace {

bool footprints_overlap(const Vec3& pa, const Vec3& ba, const Vec3& pb, const Vec3& bb) {
  for (Axis a : {Axis::X, Axis::Y}) {
    double alo = pa[a] - ba[a] / 2, ahi = pa[a] + ba[a] / 2;
    double blo = pb[a] - bb[a] / 2, bhi = pb[a] + bb[a] / 2;
    if (!(alo < bhi - kContactEps && blo < ahi - kContactEps)) return false;
  }
  return true;
}

bool resting(const Scene& s, const WorldObject& o) { return !(s.arm.holding && *s.arm.holding == o.id); }

std::uint64_t splitmix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace

std::optional<ObjectId> parse_object_id(const std::string& s) {
  if (s.size() < 2 || s[0] != 'o') return std::nullopt;
  try {
    std::size_t used = 0;
    int v = std::stoi(s.substr(1), &used);
    if (used + 1 != s.size()) return std::nullopt;
    return ObjectId{v};
  } catch (const std::exception&) {
    return std::nullopt;
  }
}

const WorldObject* Scene::find(ObjectId id) const {
  for (auto& o : objects)
    if (o.id == id) return &o;
  return nullptr;
}

WorldObject* Scene::find(ObjectId id) {
  for (auto& o : objects)
    if (o.id == id) return &o;
  return nullptr;
}

const WorldObject& Scene::at(ObjectId id) const {
  if (auto* o = find(id)) return *o;
  throw UnknownObject("no object " + id.str());
}

const NamedLocation* Scene::location(const std::string& name) const {
  for (auto& l : locations)
    if (l.name == name) return &l;
  return nullptr;
}

std::optional<ObjectId> Scene::pointed_now() const {
  if (pointed && pointed->tick == tick) return pointed->id;
  return std::nullopt;
}

std::string describe(const PrimitiveAction& a) {
  return std::visit(
      [](auto&& v) -> std::string {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, PointTo>) return "point-to(" + v.id.str() + ")";
        else if constexpr (std::is_same_v<T, PickUp>) return "pick-up(" + v.id.str() + ")";
        else {
          char buf[64];
          std::snprintf(buf, sizeof buf, "put-down(%.3f, %.3f)", v.x, v.y);
          return buf;
        }
      },
      a);
}

bool is_clear(const Scene& scene, ObjectId id) {
  const auto& o = scene.at(id);
  double top = o.pose.z + o.bbox.z / 2;
  for (auto& other : scene.objects) {
    if (other.id == id || !resting(scene, other)) continue;
    double bottom = other.pose.z - other.bbox.z / 2;
    if (std::abs(bottom - top) < 1e-9 && footprints_overlap(o.pose, o.bbox, other.pose, other.bbox))
      return false;
  }
  return true;
}

double resting_z(const Scene& scene, ObjectId moving, double x, double y) {
  const auto& m = scene.at(moving);
  Vec3 p{x, y, 0};
  const WorldObject* support = nullptr;
  double support_top = 0;
  bool any = false;
  for (auto& o : scene.objects) {
    if (o.id == moving || !resting(scene, o)) continue;
    if (!footprints_overlap(p, m.bbox, o.pose, o.bbox)) continue;
    double top = o.pose.z + o.bbox.z / 2;
    if (!any || top > support_top + 1e-12) {
      support = &o;
      support_top = top;
    }
    any = true;
  }
  if (!any) return m.bbox.z / 2;
  // the centre must sit on one of the topmost objects under the footprint
  bool supported = false;
  for (auto& o : scene.objects) {
    if (o.id == moving || !resting(scene, o)) continue;
    double top = o.pose.z + o.bbox.z / 2;
    if (std::abs(top - support_top) > 1e-12) continue;
    if (!footprints_overlap(p, m.bbox, o.pose, o.bbox)) continue;
    if (x >= o.pose.x - o.bbox.x / 2 && x <= o.pose.x + o.bbox.x / 2 &&
        y >= o.pose.y - o.bbox.y / 2 && y <= o.pose.y + o.bbox.y / 2)
      supported = true;
  }
  if (!supported)
    throw PlacementBlocked("footprint at (" + std::to_string(x) + ", " + std::to_string(y) +
                           ") collides with " + support->id.str());
  double z = support_top + m.bbox.z / 2;
  if (z + m.bbox.z / 2 > scene.workspace.h + 1e-12) throw PlacementBlocked("stack too tall");
  return z;
}

Scene apply_action(Scene scene, const PrimitiveAction& action) {
  std::visit(
      [&](auto&& a) {
        using T = std::decay_t<decltype(a)>;
        if constexpr (std::is_same_v<T, PointTo>) {
          scene.at(a.id);
        } else if constexpr (std::is_same_v<T, PickUp>) {
          const auto& o = scene.at(a.id);
          if (scene.arm.holding) throw ActionUnavailable("arm already holding " + scene.arm.holding->str());
          if (!o.graspable) throw ActionUnavailable(a.id.str() + " is not graspable");
          if (!is_clear(scene, a.id)) throw ActionUnavailable(a.id.str() + " has something on top");
        } else {
          if (!scene.arm.holding) throw ActionUnavailable("arm is empty");
          if (!(a.x >= 0 && a.x <= scene.workspace.w && a.y >= 0 && a.y <= scene.workspace.d))
            throw InvalidAction("put-down outside workspace");
        }
      },
      action);

  // preconditions hold; now mutate
  std::visit(
      [&](auto&& a) {
        using T = std::decay_t<decltype(a)>;
        if constexpr (std::is_same_v<T, PickUp>) {
          auto* o = scene.find(a.id);
          double grip = kGripperFraction * scene.workspace.h;
          o->pose.z = std::max(o->bbox.z / 2, grip - o->bbox.z / 2);
          scene.arm.holding = a.id;
        } else if constexpr (std::is_same_v<T, PutDown>) {
          ObjectId held = *scene.arm.holding;
          double z = resting_z(scene, held, a.x, a.y);
          auto* o = scene.find(held);
          o->pose = {a.x, a.y, z};
          scene.arm.holding.reset();
        }
      },
      action);

  ++scene.tick;
  if (auto* p = std::get_if<PointTo>(&action))
    scene.pointed = PointedAt{p->id, scene.tick};
  else
    scene.pointed.reset();
  return scene;
}

const perception::FeatureVector& ObjectPercept::features(perception::PropertyKind p) const {
  switch (p) {
    case perception::PropertyKind::Color: return color;
    case perception::PropertyKind::Size: return size;
    case perception::PropertyKind::Shape: return shape;
  }
  return color;
}

std::vector<ObjectPercept> observe(const Scene& scene, const NoiseConfig& noise,
                                   std::uint64_t noise_seed) {
  std::vector<ObjectPercept> out;
  out.reserve(scene.objects.size());
  for (auto& o : scene.objects) {
    std::mt19937_64 rng(splitmix(noise_seed ^ splitmix(static_cast<std::uint64_t>(o.id.value))));
    auto jitter = [&](perception::FeatureVector f, double sigma) {
      if (sigma > 0) {
        std::normal_distribution<double> n(0.0, sigma);
        for (auto& v : f) v += n(rng);
      }
      return f;
    };
    ObjectPercept p;
    p.id = o.id;
    p.pose = o.pose;
    p.bbox = o.bbox;
    p.color = jitter(perception::color_features(o.color), noise.color);
    p.size = jitter(perception::size_features(o.bbox.x, o.bbox.y), noise.size);
    p.shape = jitter(perception::shape_features(o.shape_descriptor), noise.shape);
    out.push_back(std::move(p));
  }
  return out;
}

std::vector<NamedLocation> default_locations(const Workspace& ws) {
  auto r = [&](double x0, double y0, double x1, double y1) {
    return Rect{x0 * ws.w, y0 * ws.d, x1 * ws.w, y1 * ws.d};
  };
  return {{"stove", r(0.05, 0.80, 0.20, 0.95)},
          {"dishwasher", r(0.30, 0.80, 0.45, 0.95)},
          {"garbage", r(0.55, 0.80, 0.70, 0.95)},
          {"pantry", r(0.80, 0.80, 0.95, 0.95)}};
}

// ---- json ----

void to_json(nlohmann::json& j, const ObjectId& id) { j = id.str(); }

void from_json(const nlohmann::json& j, ObjectId& id) {
  auto p = parse_object_id(j.get<std::string>());
  if (!p) throw FormatError("bad object id " + j.dump());
  id = *p;
}

void to_json(nlohmann::json& j, const PrimitiveAction& a) {
  std::visit(
      [&](auto&& v) {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, PointTo>) j = {{"kind", "point-to"}, {"object", v.id}};
        else if constexpr (std::is_same_v<T, PickUp>) j = {{"kind", "pick-up"}, {"object", v.id}};
        else j = {{"kind", "put-down"}, {"x", v.x}, {"y", v.y}};
      },
      a);
}

void from_json(const nlohmann::json& j, PrimitiveAction& a) {
  auto kind = j.at("kind").get<std::string>();
  if (kind == "point-to") a = PointTo{j.at("object").get<ObjectId>()};
  else if (kind == "pick-up") a = PickUp{j.at("object").get<ObjectId>()};
  else if (kind == "put-down") a = PutDown{j.at("x").get<double>(), j.at("y").get<double>()};
  else throw FormatError("bad action kind " + kind);
}

namespace {
nlohmann::json vec(const Vec3& v) { return {v.x, v.y, v.z}; }
Vec3 vec(const nlohmann::json& j) { return {j.at(0).get<double>(), j.at(1).get<double>(), j.at(2).get<double>()}; }
}  // namespace

nlohmann::json scene_to_json(const Scene& s) {
  nlohmann::json objs = nlohmann::json::array();
  for (auto& o : s.objects)
    objs.push_back({{"id", o.id},
                    {"pose", vec(o.pose)},
                    {"bbox", vec(o.bbox)},
                    {"color", o.color},
                    {"size_class", o.size_class},
                    {"shape_descriptor", o.shape_descriptor},
                    {"graspable", o.graspable}});
  nlohmann::json locs = nlohmann::json::array();
  for (auto& l : s.locations)
    locs.push_back({{"name", l.name}, {"region", {l.region.x0, l.region.y0, l.region.x1, l.region.y1}}});
  nlohmann::json j = {{"workspace", {{"w", s.workspace.w}, {"d", s.workspace.d}, {"h", s.workspace.h}}},
                      {"objects", objs},
                      {"locations", locs},
                      {"arm", s.arm.holding ? nlohmann::json{{"holding", *s.arm.holding}}
                                            : nlohmann::json{{"holding", nullptr}}},
                      {"tick", s.tick}};
  j["pointed"] = s.pointed ? nlohmann::json{{"object", s.pointed->id}, {"tick", s.pointed->tick}}
                           : nlohmann::json(nullptr);
  return j;
}

Scene scene_from_json(const nlohmann::json& j) {
  Scene s;
  auto& w = j.at("workspace");
  s.workspace = {w.at("w").get<double>(), w.at("d").get<double>(), w.at("h").get<double>()};
  for (auto& o : j.at("objects")) {
    WorldObject wo;
    wo.id = o.at("id").get<ObjectId>();
    wo.pose = vec(o.at("pose"));
    wo.bbox = vec(o.at("bbox"));
    wo.color = o.at("color").get<Rgb>();
    wo.size_class = o.at("size_class").get<double>();
    wo.shape_descriptor = o.at("shape_descriptor").get<std::array<double, 3>>();
    wo.graspable = o.at("graspable").get<bool>();
    s.objects.push_back(wo);
  }
  for (auto& l : j.at("locations")) {
    auto r = l.at("region");
    s.locations.push_back({l.at("name").get<std::string>(),
                           {r.at(0).get<double>(), r.at(1).get<double>(), r.at(2).get<double>(),
                            r.at(3).get<double>()}});
  }
  if (!j.at("arm").at("holding").is_null()) s.arm.holding = j.at("arm").at("holding").get<ObjectId>();
  s.tick = j.at("tick").get<std::uint64_t>();
  if (j.contains("pointed") && !j.at("pointed").is_null())
    s.pointed = PointedAt{j.at("pointed").at("object").get<ObjectId>(),
                          j.at("pointed").at("tick").get<std::uint64_t>()};
  return s;
}

nlohmann::json percept_to_json(const ObjectPercept& p) {
  return {{"id", p.id}, {"pose", vec(p.pose)}, {"bbox", vec(p.bbox)},
          {"color", p.color}, {"size", p.size}, {"shape", p.shape}};
}

}  // namespace grounded::world
