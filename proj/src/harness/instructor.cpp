#include "grounded/harness/instructor.hpp"

#include <algorithm>

#include "grounded/error.hpp"

namespace grounded::harness {

using world::ObjectId;

namespace {

// signed separation along an axis; positive when the intervals are apart
double gap(const Box& p, const Box& r, Axis a) { return std::max(r.lo(a) - p.hi(a), p.lo(a) - r.hi(a)); }
bool less(const Box& p, const Box& r, Axis a) { return p.hi(a) < r.lo(a); }
bool greater(const Box& p, const Box& r, Axis a) { return p.lo(a) > r.hi(a); }
bool aligned(const Box& p, const Box& r, Axis a) { return !less(p, r, a) && !greater(p, r, a); }

double chebyshev_gap(const Box& p, const Box& r) {
  return std::max(std::max(gap(p, r, Axis::X), 0.0), std::max(gap(p, r, Axis::Y), 0.0));
}

// the arrangement a teacher would pick first: the orthogonal axis aligned
bool canonical(const std::string& prep, const Box& p, const Box& r) {
  if (!prep_oracle(prep, p, r)) return false;
  if (prep == "left of" || prep == "right of") return aligned(p, r, Axis::Y);
  if (prep == "in front of" || prep == "behind") return aligned(p, r, Axis::X);
  if (prep == "near" || prep == "far from") return aligned(p, r, Axis::X) || aligned(p, r, Axis::Y);
  return true;
}

bool footprint_free(const world::Scene& s, world::ObjectId moving, const Box& b) {
  return std::none_of(s.objects.begin(), s.objects.end(), [&](const world::WorldObject& o) {
    return o.id != moving && s.arm.holding != o.id && std::abs(o.pose.x - b.center.x) < (o.bbox.x + b.extent.x) / 2 &&
           std::abs(o.pose.y - b.center.y) < (o.bbox.y + b.extent.y) / 2;
  });
}

}  // namespace

const std::vector<std::string>& oracle_preps() {
  static const std::vector<std::string> v{"left of", "right of", "in front of", "behind", "near", "far from"};
  return v;
}

bool prep_oracle(const std::string& prep, const Box& p, const Box& r) {
  if (prep == "left of") return less(p, r, Axis::X);
  if (prep == "right of") return greater(p, r, Axis::X);
  if (prep == "in front of") return less(p, r, Axis::Y);
  if (prep == "behind") return aligned(p, r, Axis::X) && greater(p, r, Axis::Y);
  if (prep == "near") return chebyshev_gap(p, r) <= 0.1;
  if (prep == "far from") return chebyshev_gap(p, r) >= 0.35;
  if (prep == "in")
    return p.center.x > r.lo(Axis::X) && p.center.x < r.hi(Axis::X) && p.center.y > r.lo(Axis::Y) &&
           p.center.y < r.hi(Axis::Y);
  throw FormatError("no oracle for '" + prep + "'");
}

ScriptedInstructor::ScriptedInstructor(world::Palette palette, std::map<ObjectId, world::TruthLabels> truth,
                                       double superfluous_rate, std::uint64_t seed)
    : palette_(std::move(palette)), truth_(std::move(truth)), superfluous_rate_(superfluous_rate), rng_(seed) {}

void ScriptedInstructor::set_description(bool size, bool color, bool shape) {
  use_size_ = size;
  use_color_ = color;
  use_shape_ = shape;
}

std::string ScriptedInstructor::describe(ObjectId id) {
  auto& t = truth_.at(id);
  std::string s = "the";
  if (use_size_) s += " " + t.size;
  if (use_color_) s += " " + t.color;
  s += " " + (use_shape_ ? t.shape : std::string(use_size_ ? "block" : "object"));
  intended_[s] = id;
  return s;
}

std::string ScriptedInstructor::describe_entity(const std::string& ref) {
  if (auto id = world::parse_object_id(ref)) return describe(*id);
  return "the " + ref;
}

std::string ScriptedInstructor::word_for(ObjectId id, perception::PropertyKind p) const {
  auto& t = truth_.at(id);
  switch (p) {
    case perception::PropertyKind::Color: return t.color;
    case perception::PropertyKind::Size: return t.size;
    case perception::PropertyKind::Shape: return t.shape;
  }
  return "";
}

std::optional<perception::PropertyKind> ScriptedInstructor::property_of(const std::string& word) const {
  for (auto& c : palette_.colors)
    if (c.name == word) return perception::PropertyKind::Color;
  for (auto& z : palette_.sizes)
    if (z.name == word) return perception::PropertyKind::Size;
  for (auto& h : palette_.shapes)
    if (h.name == word) return perception::PropertyKind::Shape;
  return std::nullopt;
}

std::string ScriptedInstructor::teaching_sentence(const std::string& word) const {
  if (property_of(word) == perception::PropertyKind::Shape) return "This is a " + word + ".";
  return "This is " + word + ".";
}

VerbTask ScriptedInstructor::make_task(const std::string& verb, ObjectId target, const std::string& relation,
                                       const std::string& reference) {
  VerbTask t{verb, target, relation, reference, "", ""};
  auto obj = describe(target);
  auto ref = describe_entity(reference);
  if (verb == "move")
    t.command = "Move " + obj + (relation == "in" ? " to " : " " + relation + " ") + ref + ".";
  else
    t.command = std::string(1, static_cast<char>(std::toupper(verb[0]))) + verb.substr(1) + " " + obj + ".";
  auto cap = obj;
  cap[0] = static_cast<char>(std::toupper(cap[0]));
  t.goal_sentence = cap + " is " + relation + " " + ref + ".";
  return t;
}

void ScriptedInstructor::begin_task(const VerbTask& t) {
  task_ = t;
  task_step_ = 0;
  point_at_step_ = -1;
  std::uniform_real_distribution<double> u(0, 1);
  if (u(rng_) < superfluous_rate_) point_at_step_ = static_cast<int>(rng_() % 2);
}

bool ScriptedInstructor::goal_met(const VerbTask& t, const world::Scene& s) const {
  if (s.arm.holding == t.target) return false;
  auto* o = s.find(t.target);
  if (!o) return false;
  Box ref;
  if (auto id = world::parse_object_id(t.reference)) {
    auto* r = s.find(*id);
    if (!r) return false;
    ref = r->box();
  } else {
    auto* l = s.location(t.reference);
    if (!l) return false;
    ref = l->box();
  }
  return prep_oracle(t.relation, o->box(), ref);
}

bool ScriptedInstructor::feasible(const VerbTask& t, const world::Scene& s) { return goal_pose(t, s).has_value(); }

std::optional<std::array<double, 2>> ScriptedInstructor::goal_pose(const VerbTask& t, const world::Scene& s) {
  auto* o = s.find(t.target);
  if (!o) return std::nullopt;
  Box ref;
  if (auto id = world::parse_object_id(t.reference)) {
    if (*id == t.target || !s.find(*id)) return std::nullopt;
    ref = s.find(*id)->box();
  } else if (auto* l = s.location(t.reference)) {
    ref = l->box();
  } else {
    return std::nullopt;
  }
  std::uniform_real_distribution<double> u(0, 1);
  for (int attempt = 0; attempt < 4000; ++attempt) {
    Box b{{o->bbox.x / 2 + u(rng_) * (s.workspace.w - o->bbox.x), o->bbox.y / 2 + u(rng_) * (s.workspace.d - o->bbox.y),
           o->bbox.z / 2},
          o->bbox};
    if (prep_oracle(t.relation, b, ref) && footprint_free(s, t.target, b)) return std::array{b.center.x, b.center.y};
  }
  return std::nullopt;
}

std::string ScriptedInstructor::next_instruction(const world::Scene& s) {
  if (!task_) return "never mind";
  if (point_at_step_ == task_step_) {
    point_at_step_ = -1;
    ++superfluous_given_;
    auto& objs = s.objects;
    auto id = objs[rng_() % objs.size()].id;
    return "Point to " + describe(id) + ".";
  }
  ++task_step_;
  auto held = s.arm.holding;
  if (held == task_->target) {
    auto rel = task_->relation;
    return "Put " + describe(task_->target) + " " + rel + " " + describe_entity(task_->reference) + ".";
  }
  if (held) return "Put down " + describe(*held) + ".";
  return "Pick up " + describe(task_->target) + ".";
}

std::optional<Reply> ScriptedInstructor::prep_example(const std::string& prep, world::Scene& s) {
  auto sentence = [&](ObjectId a, const std::string& ref) {
    auto d = describe(a);
    d[0] = static_cast<char>(std::toupper(d[0]));
    return Reply{d + " is " + prep + " " + describe_entity(ref) + ".", {}};
  };
  auto usable = [&](const world::WorldObject& o) { return truth_.count(o.id) && s.arm.holding != o.id; };
  // an arrangement already on the table
  for (auto& a : s.objects) {
    if (!usable(a)) continue;
    if (prep != "in")
      for (auto& b : s.objects)
        if (b.id != a.id && usable(b) && canonical(prep, a.box(), b.box())) return sentence(a.id, b.id.str());
    for (auto& l : s.locations)
      if (canonical(prep, a.box(), l.box())) return sentence(a.id, l.name);
  }
  // otherwise set one up, leaving the objects of the current task alone
  auto busy = [&](ObjectId id) {
    return task_ && (id == task_->target || id.str() == task_->reference);
  };
  std::uniform_real_distribution<double> u(0, 1);
  for (auto& a : s.objects) {
    if (!usable(a) || busy(a.id) || !world::is_clear(s, a.id)) continue;
    std::vector<std::pair<std::string, Box>> refs;
    for (auto& l : s.locations) refs.emplace_back(l.name, l.box());
    if (prep != "in")
      for (auto& b : s.objects)
        if (b.id != a.id && usable(b)) refs.emplace_back(b.id.str(), b.box());
    for (auto& [name, rb] : refs)
      for (int attempt = 0; attempt < 2000; ++attempt) {
        double x = a.bbox.x / 2 + u(rng_) * (s.workspace.w - a.bbox.x);
        double y = a.bbox.y / 2 + u(rng_) * (s.workspace.d - a.bbox.y);
        Box box{{x, y, a.bbox.z / 2}, a.bbox};
        if (!canonical(prep, box, rb) || !footprint_free(s, a.id, box)) continue;
        s.find(a.id)->pose = box.center;
        return sentence(a.id, name);
      }
  }
  return Reply{"never mind", {}};
}

std::optional<Reply> ScriptedInstructor::answer(const dialog::Utterance& q, world::Scene& s) {
  using language::TemplateId;
  auto bound = [&](const char* k) {
    auto it = q.bindings.find(k);
    return it == q.bindings.end() ? std::string() : it->second;
  };
  switch (q.tmpl) {
    case TemplateId::AskProperty: {
      auto p = property_of(bound("word"));
      if (!p) return Reply{"never mind", {}};
      return Reply{perception::property_name(*p), {}};
    }
    case TemplateId::AskExample: {
      auto w = bound("word");
      auto p = property_of(w);
      if (p)
        for (auto& o : s.objects)
          if (truth_.count(o.id) && word_for(o.id, *p) == w && s.arm.holding != o.id)
            return Reply{teaching_sentence(w), o.id};
      return Reply{"never mind", {}};
    }
    case TemplateId::AskPrepExample: return prep_example(bound("prep"), s);
    case TemplateId::AskWhich: {
      auto it = intended_.find(bound("key"));
      if (it != intended_.end()) return Reply{"this one", it->second};
      auto c = bound("candidates");
      if (auto id = world::parse_object_id(c.substr(0, c.find(',')))) return Reply{"this one", *id};
      return Reply{"never mind", {}};
    }
    case TemplateId::AskGoal:
      if (task_) return Reply{task_->goal_sentence, {}};
      return Reply{"never mind", {}};
    case TemplateId::AskNextAction: return Reply{next_instruction(s), {}};
    default: return std::nullopt;
  }
}

}  // namespace grounded::harness
