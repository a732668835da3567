#include "grounded/agent/action_model.hpp"

#include <algorithm>
#include <cmath>

#include "grounded/error.hpp"

namespace grounded::agent {

using world::ObjectId;

const SimObject* SimState::find(ObjectId id) const {
  for (auto& o : objects)
    if (o.id == id) return &o;
  return nullptr;
}

SimState sim_from_scene(const world::Scene& s) {
  SimState out{s.workspace, {}, s.arm.holding};
  for (auto& o : s.objects) out.objects.push_back({o.id, o.pose, o.bbox, o.graspable});
  return out;
}

SimState sim_from_percepts(const std::vector<world::ObjectPercept>& ps, std::optional<ObjectId> holding,
                           const Workspace& ws) {
  SimState out{ws, {}, holding};
  for (auto& p : ps) out.objects.push_back({p.id, p.pose, p.bbox, true});
  return out;
}

SimState sim_from_episode(const memory::EpisodeSnapshot& e, const Workspace& ws) {
  SimState out{ws, {}, e.holding};
  for (auto& p : e.objects) out.objects.push_back({p.id, p.pose, p.bbox, true});
  return out;
}

namespace action_model {

namespace {

constexpr double kEps = 1e-9;

// strict footprint overlap; touching edges do not count
bool overlaps(double ax, double ay, const Vec3& abox, const SimObject& b) {
  return std::abs(ax - b.pose.x) < (abox.x + b.bbox.x) / 2 - kEps &&
         std::abs(ay - b.pose.y) < (abox.y + b.bbox.y) / 2 - kEps;
}

bool on_table_or_stack(const SimState& s, const SimObject& o) { return !(s.holding && *s.holding == o.id); }

double top_of(const SimObject& o) { return o.pose.z + o.bbox.z / 2; }

const SimObject& must_find(const SimState& s, ObjectId id) {
  if (auto* o = s.find(id)) return *o;
  throw UnknownObject("no object " + id.str());
}

}  // namespace

bool clear(const SimState& s, ObjectId id) {
  const auto& o = must_find(s, id);
  for (auto& other : s.objects) {
    if (other.id == id || !on_table_or_stack(s, other)) continue;
    bool resting_on = std::abs((other.pose.z - other.bbox.z / 2) - top_of(o)) < kEps;
    if (resting_on && overlaps(o.pose.x, o.pose.y, o.bbox, other)) return false;
  }
  return true;
}

std::optional<std::string> blocked(const SimState& s, const world::PrimitiveAction& a) {
  if (auto* p = std::get_if<world::PointTo>(&a)) {
    if (!s.find(p->id)) return "no object " + p->id.str();
    return std::nullopt;
  }
  if (auto* p = std::get_if<world::PickUp>(&a)) {
    auto* o = s.find(p->id);
    if (!o) return "no object " + p->id.str();
    if (s.holding) return "arm is holding " + s.holding->str();
    if (!o->graspable) return p->id.str() + " cannot be grasped";
    if (!clear(s, p->id)) return p->id.str() + " is covered";
    return std::nullopt;
  }
  auto& d = std::get<world::PutDown>(a);
  if (!s.holding) return "arm is empty";
  if (d.x < 0 || d.y < 0 || d.x > s.ws.w || d.y > s.ws.d) return "outside the workspace";
  try {
    apply(s, a);
  } catch (const Error& e) {
    return e.what();
  }
  return std::nullopt;
}

SimState apply(SimState s, const world::PrimitiveAction& a) {
  if (auto* p = std::get_if<world::PointTo>(&a)) {
    must_find(s, p->id);
    return s;
  }
  if (auto* p = std::get_if<world::PickUp>(&a)) {
    const auto& o = must_find(s, p->id);
    if (s.holding) throw ActionUnavailable("arm is holding " + s.holding->str());
    if (!o.graspable) throw ActionUnavailable(p->id.str() + " cannot be grasped");
    if (!clear(s, p->id)) throw ActionUnavailable(p->id.str() + " is covered");
    for (auto& obj : s.objects)
      if (obj.id == p->id) obj.pose.z = std::max(obj.bbox.z / 2, kGripHeight * s.ws.h - obj.bbox.z / 2);
    s.holding = p->id;
    return s;
  }
  auto& d = std::get<world::PutDown>(a);
  if (!s.holding) throw ActionUnavailable("arm is empty");
  if (d.x < 0 || d.y < 0 || d.x > s.ws.w || d.y > s.ws.d) throw InvalidAction("outside the workspace");
  const auto& held = must_find(s, *s.holding);

  // highest surface under the footprint
  double surface = 0;
  std::vector<const SimObject*> under;
  for (auto& o : s.objects) {
    if (o.id == held.id || !on_table_or_stack(s, o) || !overlaps(d.x, d.y, held.bbox, o)) continue;
    under.push_back(&o);
    surface = std::max(surface, top_of(o));
  }
  if (!under.empty()) {
    bool centred = std::any_of(under.begin(), under.end(), [&](const SimObject* o) {
      return std::abs(top_of(*o) - surface) <= 1e-12 && std::abs(d.x - o->pose.x) <= o->bbox.x / 2 &&
             std::abs(d.y - o->pose.y) <= o->bbox.y / 2;
    });
    if (!centred) throw PlacementBlocked("no support under the centre");
  }
  double z = surface + held.bbox.z / 2;
  if (z + held.bbox.z / 2 > s.ws.h + 1e-12) throw PlacementBlocked("too tall");
  for (auto& obj : s.objects)
    if (obj.id == held.id) obj.pose = {d.x, d.y, z};
  s.holding.reset();
  return s;
}

}  // namespace action_model

}  // namespace grounded::agent
