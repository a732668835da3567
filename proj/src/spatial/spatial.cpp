#include "grounded/spatial/spatial.hpp"

#include <algorithm>
#include <vector>

#include "grounded/error.hpp"

namespace grounded::spatial {

const char* relation_name(Relation r) {
  switch (r) {
    case Relation::Aligned: return "aligned";
    case Relation::GreaterThan: return "greater";
    case Relation::LessThan: return "less";
  }
  return "?";
}

Relation relation_from_name(const std::string& s) {
  for (auto r : kRelations)
    if (s == relation_name(r)) return r;
  throw FormatError("bad relation " + s);
}

Primitives extract_primitives(const Box& primary, const Box& reference) {
  Primitives out;
  for (Axis a : kAxes) {
    int i = static_cast<int>(a);
    double plo = primary.lo(a), phi = primary.hi(a);
    double rlo = reference.lo(a), rhi = reference.hi(a);
    if (plo > rhi) {
      out.rel[i] = Relation::GreaterThan;
      out.dist[i] = plo - rhi;
    } else if (phi < rlo) {
      out.rel[i] = Relation::LessThan;
      out.dist[i] = rlo - phi;
    } else {
      out.rel[i] = Relation::Aligned;
      out.dist[i] = 0;
    }
  }
  return out;
}

bool SpatialComposition::window_active(Axis a, const Workspace& ws) const {
  auto& s = stats(a);
  return s.count >= 2 && s.span() < kWindowSpanFraction * ws.extent(a);
}

SpatialComposition learn_example(const std::optional<SpatialComposition>& comp, const Primitives& p) {
  SpatialComposition c = comp.value_or(SpatialComposition{});
  bool all_aligned = true;
  for (Axis a : kAxes) {
    int i = static_cast<int>(a);
    c.allowed[i].insert(p.rel[i]);
    if (p.rel[i] == Relation::Aligned) continue;
    all_aligned = false;
    auto& s = c.dist[i];
    double d = p.dist[i];
    if (s.count == 0) {
      s = {1, d, d, d};
    } else {
      ++s.count;
      s.min = std::min(s.min, d);
      s.max = std::max(s.max, d);
      s.mean += (d - s.mean) / s.count;
      s.mean = std::clamp(s.mean, s.min, s.max);
    }
  }
  ++c.example_count;
  if (all_aligned) c.ever_all_aligned = true;
  return c;
}

bool evaluate(const SpatialComposition& comp, const Primitives& p, const Workspace& ws) {
  if (comp.example_count == 0) throw UntrainedComposition("composition has no examples");
  for (Axis a : kAxes) {
    if (!comp.on(a).contains(p[a])) return false;
    if (p[a] == Relation::Aligned || !comp.window_active(a, ws)) continue;
    auto& s = comp.stats(a);
    double slack = std::max(kWindowSlack * s.span(), kWindowMinSlack);
    double d = p.gap(a);
    if (d < s.min - slack || d > s.max + slack) return false;
  }
  return true;
}

bool evaluate(const SpatialComposition& comp, const Box& primary, const Box& reference, const Workspace& ws) {
  return evaluate(comp, extract_primitives(primary, reference), ws);
}

Projection project(const SpatialComposition& comp, const Box& primary, const Box& reference,
                   const Workspace& ws, std::mt19937_64& rng) {
  if (comp.example_count == 0) throw UntrainedComposition("composition has no examples");
  Projection out;
  for (Axis a : kAxes) {
    int i = static_cast<int>(a);
    std::vector<Relation> legal;
    for (auto r : kRelations)
      if (comp.allowed[i].contains(r)) legal.push_back(r);
    Relation r = legal.size() == 1
                     ? legal[0]
                     : legal[std::uniform_int_distribution<std::size_t>(0, legal.size() - 1)(rng)];
    out.chosen[i] = r;
    double offset = 0;
    if (r != Relation::Aligned) {
      offset = comp.dist[i].mean + reference.extent[a] / 2 + primary.extent[a] / 2;
      if (r == Relation::LessThan) offset = -offset;
    }
    out.point[a] = std::clamp(reference.center[a] + offset, 0.0, ws.extent(a));
  }
  return out;
}

nlohmann::json composition_to_json(const SpatialComposition& c) {
  nlohmann::json allowed, dist;
  for (Axis a : kAxes) {
    auto rels = nlohmann::json::array();
    for (auto r : kRelations)
      if (c.on(a).contains(r)) rels.push_back(relation_name(r));
    allowed[axis_name(a)] = rels;
    auto& s = c.stats(a);
    dist[axis_name(a)] = {{"n", s.count}, {"min", s.min}, {"max", s.max}, {"mean", s.mean}};
  }
  return {{"allowed", allowed}, {"dist", dist}, {"examples", c.example_count},
          {"ever_all_aligned", c.ever_all_aligned}};
}

SpatialComposition composition_from_json(const nlohmann::json& j) {
  SpatialComposition c;
  for (Axis a : kAxes) {
    int i = static_cast<int>(a);
    for (auto& r : j.at("allowed").at(axis_name(a))) c.allowed[i].insert(relation_from_name(r.get<std::string>()));
    auto& d = j.at("dist").at(axis_name(a));
    c.dist[i] = {d.at("n").get<int>(), d.at("min").get<double>(), d.at("max").get<double>(),
                 d.at("mean").get<double>()};
  }
  c.example_count = j.at("examples").get<int>();
  c.ever_all_aligned = j.at("ever_all_aligned").get<bool>();
  return c;
}

}  // namespace grounded::spatial
