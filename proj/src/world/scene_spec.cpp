#include "grounded/world/scene_spec.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "grounded/error.hpp"

namespace grounded::world {

namespace {

template <class T>
const T& pick(const std::vector<T>& v, const std::string& name, std::mt19937_64& rng, const char* what) {
  if (v.empty()) throw FormatError(std::string("empty palette ") + what);
  if (name == "*") return v[std::uniform_int_distribution<std::size_t>(0, v.size() - 1)(rng)];
  for (auto& e : v)
    if (e.name == name) return e;
  throw FormatError(std::string("unknown ") + what + " '" + name + "'");
}

bool rect_hit(double x, double y, double hw, double hd, const Rect& r) {
  return x + hw > r.x0 && x - hw < r.x1 && y + hd > r.y0 && y - hd < r.y1;
}

constexpr double kClearance = 0.01;

}  // namespace

Palette default_palette() {
  double h = 0.225;
  return {{{"red", {1, 0, 0}}, {"blue", {0, 0, 1}}, {"green", {0, 0.8, 0}}, {"yellow", {1, 1, 0}}},
          {{"small", 0.06}, {"large", 0.12}},
          {{"triangle", {0.5 - h, 0.5 - h, 0.5 - h}},
           {"square", {0.5 + h, 0.5 + h, 0.5 - h}},
           {"circle", {0.5 + h, 0.5 - h, 0.5 + h}},
           {"star", {0.5 - h, 0.5 + h, 0.5 + h}}}};
}

GeneratedScene generate_scene(const SceneSpec& spec, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  GeneratedScene out;
  Scene& s = out.scene;
  s.workspace = spec.workspace;
  s.locations = spec.locations ? *spec.locations : default_locations(spec.workspace);

  struct Pending {
    const PaletteColor* c;
    const PaletteSize* z;
    const PaletteShape* h;
    const ObjectSpec* o;
  };
  std::vector<Pending> pending;
  double area = 0;
  for (auto& o : spec.objects) {
    Pending p{&pick(spec.palette.colors, o.color, rng, "color"), &pick(spec.palette.sizes, o.size, rng, "size"),
              &pick(spec.palette.shapes, o.shape, rng, "shape"), &o};
    if (!(p.z->scale > 0)) throw FormatError("size scale must be positive");
    area += p.z->scale * p.z->scale;
    pending.push_back(p);
  }
  if (area > spec.workspace.w * spec.workspace.d)
    throw PlacementInfeasible("object footprints exceed the table area");

  // explicit poses first so random placements can avoid them
  std::vector<std::size_t> order(pending.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_partition(order.begin(), order.end(), [&](std::size_t i) { return pending[i].o->pose.has_value(); });

  std::vector<std::optional<WorldObject>> placed(pending.size());
  auto collides = [&](double x, double y, double e, double clearance) {
    for (auto& q : placed) {
      if (!q) continue;
      double gap = (e + q->bbox.x) / 2 + clearance;
      if (std::abs(x - q->pose.x) < gap - 1e-12 && std::abs(y - q->pose.y) < gap - 1e-12) return true;
    }
    return false;
  };

  std::normal_distribution<double> gauss(0.0, 1.0);
  for (std::size_t i : order) {
    auto& p = pending[i];
    double e = p.z->scale;
    WorldObject w;
    w.id = ObjectId{static_cast<int>(i) + 1};
    w.bbox = {e, e, e};
    w.color = p.c->rgb;
    w.size_class = e;
    w.graspable = p.o->graspable;
    if (p.o->pose) {
      double x = (*p.o->pose)[0], y = (*p.o->pose)[1];
      if (x < 0 || x > s.workspace.w || y < 0 || y > s.workspace.d)
        throw PlacementInfeasible("pose outside workspace");
      if (collides(x, y, e, 0)) throw PlacementInfeasible("explicit poses overlap");
      w.pose = {x, y, e / 2};
    } else {
      bool ok = false;
      std::uniform_real_distribution<double> ux(e / 2, s.workspace.w - e / 2), uy(e / 2, s.workspace.d - e / 2);
      for (int attempt = 0; attempt < 4000 && !ok; ++attempt) {
        double x = ux(rng), y = uy(rng);
        if (collides(x, y, e, kClearance)) continue;
        // prefer to keep named regions free, but give up on that late
        if (attempt < 2000 &&
            std::any_of(s.locations.begin(), s.locations.end(),
                        [&](const NamedLocation& l) { return rect_hit(x, y, e / 2, e / 2, l.region); }))
          continue;
        w.pose = {x, y, e / 2};
        ok = true;
      }
      if (!ok) throw PlacementInfeasible("could not place object " + std::to_string(i + 1));
    }
    if (e > s.workspace.h) throw PlacementInfeasible("object taller than workspace");
    placed[i] = w;
  }

  // shape descriptors, in object order
  std::vector<std::pair<std::array<double, 3>, std::string>> descs;
  for (std::size_t i = 0; i < pending.size(); ++i) {
    auto& p = pending[i];
    std::array<double, 3> d = p.h->descriptor;
    if (spec.shape_variation > 0) {
      std::array<double, 3> best{};
      double best_min = -1;
      for (int attempt = 0; attempt < 1000; ++attempt) {
        std::array<double, 3> c;
        for (int k = 0; k < 3; ++k)
          c[k] = std::clamp(p.h->descriptor[k] + spec.shape_variation * gauss(rng), 0.0, 1.0);
        double mn = 1e9;
        for (auto& [od, oname] : descs) {
          if (oname == p.h->name) continue;
          double d2 = 0;
          for (int k = 0; k < 3; ++k) d2 += (c[k] - od[k]) * (c[k] - od[k]);
          mn = std::min(mn, std::sqrt(d2));
        }
        if (mn > best_min) {
          best_min = mn;
          best = c;
        }
        if (mn >= spec.shape_separation) break;
      }
      d = best;
    }
    descs.emplace_back(d, p.h->name);
    placed[i]->shape_descriptor = d;
    s.objects.push_back(*placed[i]);
    out.truth[placed[i]->id] = {p.c->name, p.z->name, p.h->name};
  }
  return out;
}

SceneSpec scene_spec_from_json(const nlohmann::json& j) {
  SceneSpec s;
  s.version = j.value("version", 1);
  if (s.version != 1) throw FormatError("unsupported scene spec version");
  if (j.contains("workspace")) {
    auto& w = j["workspace"];
    s.workspace = {w.value("w", 1.0), w.value("d", 1.0), w.value("h", 0.5)};
  }
  s.palette = default_palette();
  if (j.contains("palette")) {
    auto& p = j["palette"];
    if (p.contains("colors")) {
      s.palette.colors.clear();
      for (auto& c : p["colors"]) s.palette.colors.push_back({c.at("name"), c.at("rgb").get<Rgb>()});
    }
    if (p.contains("sizes")) {
      s.palette.sizes.clear();
      for (auto& c : p["sizes"]) s.palette.sizes.push_back({c.at("name"), c.at("scale").get<double>()});
    }
    if (p.contains("shapes")) {
      s.palette.shapes.clear();
      for (auto& c : p["shapes"])
        s.palette.shapes.push_back({c.at("name"), c.at("descriptor").get<std::array<double, 3>>()});
    }
  }
  for (auto& o : j.value("objects", nlohmann::json::array())) {
    ObjectSpec os;
    os.color = o.value("color", "*");
    os.size = o.value("size", "*");
    os.shape = o.value("shape", "*");
    os.graspable = o.value("graspable", true);
    if (o.contains("pose")) os.pose = o["pose"].get<std::array<double, 2>>();
    int count = o.value("count", 1);
    for (int i = 0; i < count; ++i) s.objects.push_back(os);
  }
  if (j.contains("locations")) {
    std::vector<NamedLocation> locs;
    for (auto& l : j["locations"]) {
      auto r = l.at("region");
      locs.push_back({l.at("name"), {r.at(0), r.at(1), r.at(2), r.at(3)}});
    }
    s.locations = locs;
  }
  s.shape_variation = j.value("shape_variation", 0.0);
  s.shape_separation = j.value("shape_separation", 0.0);
  s.seed = j.value("seed", std::uint64_t{0});
  return s;
}

nlohmann::json scene_spec_to_json(const SceneSpec& s) {
  nlohmann::json pal = {{"colors", nlohmann::json::array()}, {"sizes", nlohmann::json::array()},
                        {"shapes", nlohmann::json::array()}};
  for (auto& c : s.palette.colors) pal["colors"].push_back({{"name", c.name}, {"rgb", c.rgb}});
  for (auto& c : s.palette.sizes) pal["sizes"].push_back({{"name", c.name}, {"scale", c.scale}});
  for (auto& c : s.palette.shapes) pal["shapes"].push_back({{"name", c.name}, {"descriptor", c.descriptor}});
  nlohmann::json objs = nlohmann::json::array();
  for (auto& o : s.objects) {
    nlohmann::json jo = {{"color", o.color}, {"size", o.size}, {"shape", o.shape}, {"graspable", o.graspable}};
    if (o.pose) jo["pose"] = *o.pose;
    objs.push_back(jo);
  }
  nlohmann::json j = {{"version", s.version},
                      {"workspace", {{"w", s.workspace.w}, {"d", s.workspace.d}, {"h", s.workspace.h}}},
                      {"palette", pal},
                      {"objects", objs},
                      {"shape_variation", s.shape_variation},
                      {"shape_separation", s.shape_separation},
                      {"seed", s.seed}};
  if (s.locations) {
    nlohmann::json locs = nlohmann::json::array();
    for (auto& l : *s.locations)
      locs.push_back({{"name", l.name}, {"region", {l.region.x0, l.region.y0, l.region.x1, l.region.y1}}});
    j["locations"] = locs;
  }
  return j;
}

}  // namespace grounded::world
