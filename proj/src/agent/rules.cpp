#include "grounded/agent/rules.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "grounded/error.hpp"

namespace grounded::agent {

using world::ObjectId;

std::optional<Entity> parse_entity(const std::string& s) {
  if (auto id = world::parse_object_id(s)) return Entity::of(*id);
  if (s.empty()) return std::nullopt;
  return Entity::at(s);
}

namespace {

const char* literal_name(LiteralKind k) {
  switch (k) {
    case LiteralKind::GoalUnsatisfied: return "goal-unsatisfied";
    case LiteralKind::ArmEmpty: return "arm-empty";
    case LiteralKind::Holding: return "holding";
    case LiteralKind::HoldingOther: return "holding-other";
    case LiteralKind::Clear: return "clear";
  }
  return "?";
}

LiteralKind literal_from_name(const std::string& s) {
  for (auto k : {LiteralKind::GoalUnsatisfied, LiteralKind::ArmEmpty, LiteralKind::Holding,
                 LiteralKind::HoldingOther, LiteralKind::Clear})
    if (s == literal_name(k)) return k;
  throw FormatError("bad literal " + s);
}

const char* action_name(ActionKind k) {
  switch (k) {
    case ActionKind::PickUp: return "pick-up";
    case ActionKind::PutDownGoal: return "put-down-goal";
    case ActionKind::PutDownFree: return "put-down-free";
    case ActionKind::PointTo: return "point-to";
  }
  return "?";
}

ActionKind action_from_name(const std::string& s) {
  for (auto k : {ActionKind::PickUp, ActionKind::PutDownGoal, ActionKind::PutDownFree, ActionKind::PointTo})
    if (s == action_name(k)) return k;
  throw FormatError("bad action template " + s);
}

std::optional<ObjectId> bound_object(const SlotBindings& b, const std::string& slot) {
  auto it = b.find(slot);
  if (it == b.end()) return std::nullopt;
  return it->second.object;
}

std::optional<std::string> slot_of(const SlotBindings& b, ObjectId id) {
  for (auto& [slot, e] : b)
    if (e.object && *e.object == id) return slot;
  return std::nullopt;
}

// ground literals used during regression
struct Fact {
  enum Kind { Goal, ArmEmpty, Holding, Clear } kind;
  ObjectId id;
  auto operator<=>(const Fact&) const = default;
};

bool fact_true(const Fact& f, const SimState& s, const GoalTest& goal) {
  switch (f.kind) {
    case Fact::Goal: return goal(s);
    case Fact::ArmEmpty: return !s.holding;
    case Fact::Holding: return s.holding && *s.holding == f.id;
    case Fact::Clear: return s.find(f.id) && action_model::clear(s, f.id);
  }
  return false;
}

std::set<Fact> preconditions(const SimState& before, const world::PrimitiveAction& a) {
  if (auto* p = std::get_if<world::PickUp>(&a)) return {{Fact::ArmEmpty, {}}, {Fact::Clear, p->id}};
  if (std::holds_alternative<world::PutDown>(a) && before.holding) return {{Fact::Holding, *before.holding}};
  return {};
}

}  // namespace

std::string literal_text(const Literal& l) {
  return l.slot.empty() ? literal_name(l.kind) : std::string(literal_name(l.kind)) + "(" + l.slot + ")";
}

std::string action_template_text(const ActionTemplate& a) {
  return a.slot.empty() ? action_name(a.kind) : std::string(action_name(a.kind)) + "(" + a.slot + ")";
}

bool holds(const Literal& l, const SimState& s, const SlotBindings& b, bool goal_satisfied) {
  switch (l.kind) {
    case LiteralKind::GoalUnsatisfied: return !goal_satisfied;
    case LiteralKind::ArmEmpty: return !s.holding;
    case LiteralKind::Holding: {
      auto id = bound_object(b, l.slot);
      return id && s.holding && *s.holding == *id;
    }
    case LiteralKind::HoldingOther: return s.holding && !slot_of(b, *s.holding);
    case LiteralKind::Clear: {
      auto id = bound_object(b, l.slot);
      return id && s.find(*id) && action_model::clear(s, *id);
    }
  }
  return false;
}

bool rule_matches(const LearnedRule& r, const SimState& s, const SlotBindings& b, bool goal_satisfied) {
  return std::all_of(r.conditions.begin(), r.conditions.end(),
                     [&](const Literal& l) { return holds(l, s, b, goal_satisfied); });
}

std::vector<const LearnedRule*> matching_rules(const std::vector<LearnedRule>& rules, const std::string& op,
                                               const SimState& s, const SlotBindings& b, bool goal_satisfied) {
  std::vector<const LearnedRule*> out;
  for (auto& r : rules)
    if (r.operator_id == op && rule_matches(r, s, b, goal_satisfied)) out.push_back(&r);
  std::stable_sort(out.begin(), out.end(), [](const LearnedRule* a, const LearnedRule* b) {
    return a->conditions.size() > b->conditions.size();
  });
  return out;
}

std::vector<LearnedRule> regress(const std::string& op, const std::vector<ReplayStep>& steps,
                                 const SlotBindings& b, const GoalTest& goal) {
  std::set<Fact> needed{{Fact::Goal, {}}};
  std::vector<LearnedRule> out;
  for (auto it = steps.rbegin(); it != steps.rend(); ++it) {
    std::set<Fact> achieved;
    for (auto& f : needed)
      if (!fact_true(f, it->before, goal) && fact_true(f, it->after, goal)) achieved.insert(f);
    if (achieved.empty()) continue;

    auto pre = preconditions(it->before, it->action);
    for (auto& f : achieved) needed.erase(f);
    needed.insert(pre.begin(), pre.end());

    LearnedRule r;
    r.operator_id = op;
    r.conditions.push_back({LiteralKind::GoalUnsatisfied, ""});
    bool general = true;
    for (auto& f : pre) {
      switch (f.kind) {
        case Fact::ArmEmpty: r.conditions.push_back({LiteralKind::ArmEmpty, ""}); break;
        case Fact::Holding:
          if (auto slot = slot_of(b, f.id)) r.conditions.push_back({LiteralKind::Holding, *slot});
          else r.conditions.push_back({LiteralKind::HoldingOther, ""});
          break;
        case Fact::Clear:
          if (auto slot = slot_of(b, f.id)) r.conditions.push_back({LiteralKind::Clear, *slot});
          else general = false;
          break;
        case Fact::Goal: break;
      }
    }
    if (auto* p = std::get_if<world::PickUp>(&it->action)) {
      auto slot = slot_of(b, p->id);
      if (!slot) general = false;
      else r.action = {ActionKind::PickUp, *slot};
    } else if (auto* p = std::get_if<world::PointTo>(&it->action)) {
      auto slot = slot_of(b, p->id);
      if (!slot) general = false;
      else r.action = {ActionKind::PointTo, *slot};
    } else {
      r.action = {achieved.count({Fact::Goal, {}}) ? ActionKind::PutDownGoal : ActionKind::PutDownFree, ""};
    }
    // an action on an object no slot names cannot be generalised
    if (!general) continue;
    std::sort(r.conditions.begin(), r.conditions.end());
    out.insert(out.begin(), r);
  }
  return out;
}

std::vector<ReplayStep> replay_episodes(const memory::EpisodicMemory& em, std::uint64_t from, std::uint64_t to,
                                        const Workspace& ws) {
  std::vector<ReplayStep> steps;
  for (auto& ep : em.span(from, to)) {
    if (!ep.snapshot.action || ep.index <= 1) continue;
    auto where = "episode " + std::to_string(ep.index) + ": ";
    auto before = sim_from_episode(em.get(ep.index - 1).snapshot, ws);
    auto after = sim_from_episode(ep.snapshot, ws);
    const auto& a = *ep.snapshot.action;
    SimState predicted;
    try {
      predicted = action_model::apply(before, a);
    } catch (const Error& e) {
      throw ReplayDivergence(where + e.what());
    }
    if (predicted.holding != after.holding) throw ReplayDivergence(where + "arm state differs");
    std::optional<ObjectId> moved;
    if (auto* p = std::get_if<world::PickUp>(&a)) moved = p->id;
    if (std::holds_alternative<world::PutDown>(a)) moved = before.holding;
    if (moved) {
      auto* x = predicted.find(*moved);
      auto* y = after.find(*moved);
      if (!x || !y || std::abs(x->pose.x - y->pose.x) > 1e-6 || std::abs(x->pose.y - y->pose.y) > 1e-6 ||
          std::abs(x->pose.z - y->pose.z) > 1e-6)
        throw ReplayDivergence(where + moved->str() + " ends elsewhere");
    }
    steps.push_back({before, a, after});
  }
  return steps;
}

nlohmann::json rule_to_json(const LearnedRule& r) {
  nlohmann::json conds = nlohmann::json::array();
  for (auto& l : r.conditions) conds.push_back({{"kind", literal_name(l.kind)}, {"slot", l.slot}});
  return {{"rule_id", r.rule_id},
          {"operator_id", r.operator_id},
          {"conditions", conds},
          {"action", {{"kind", action_name(r.action.kind)}, {"slot", r.action.slot}}},
          {"text", [&] {
             std::string s;
             for (auto& l : r.conditions) s += (s.empty() ? "" : " & ") + literal_text(l);
             return s + " -> " + action_template_text(r.action);
           }()}};
}

LearnedRule rule_from_json(const nlohmann::json& j) {
  LearnedRule r;
  r.rule_id = j.at("rule_id");
  r.operator_id = j.at("operator_id");
  for (auto& c : j.at("conditions")) r.conditions.push_back({literal_from_name(c.at("kind")), c.at("slot")});
  r.action = {action_from_name(j.at("action").at("kind")), j.at("action").at("slot")};
  return r;
}

}  // namespace grounded::agent
