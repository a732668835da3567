#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "grounded/agent/action_model.hpp"
#include "json.hpp"

namespace grounded::agent {

// a world entity an argument slot can be bound to
struct Entity {
  std::optional<world::ObjectId> object;
  std::string location;  // set when the entity is a named location

  static Entity of(world::ObjectId id) { return {id, ""}; }
  static Entity at(std::string name) { return {std::nullopt, std::move(name)}; }
  bool is_object() const { return object.has_value(); }
  std::string str() const { return object ? object->str() : location; }
  bool operator==(const Entity&) const = default;
};

std::optional<Entity> parse_entity(const std::string& s);

struct GoalInstance {
  std::string relation;  // preposition
  world::ObjectId primary;
  Entity reference;
  bool operator==(const GoalInstance&) const = default;
};

enum class LiteralKind { GoalUnsatisfied, ArmEmpty, Holding, HoldingOther, Clear };

struct Literal {
  LiteralKind kind = LiteralKind::GoalUnsatisfied;
  std::string slot;  // Holding, Clear
  auto operator<=>(const Literal&) const = default;
};

std::string literal_text(const Literal& l);

enum class ActionKind { PickUp, PutDownGoal, PutDownFree, PointTo };

struct ActionTemplate {
  ActionKind kind = ActionKind::PickUp;
  std::string slot;  // PickUp, PointTo
  bool operator==(const ActionTemplate&) const = default;
};

std::string action_template_text(const ActionTemplate& a);

struct LearnedRule {
  std::string rule_id;
  std::string operator_id;
  std::vector<Literal> conditions;  // sorted
  ActionTemplate action;
  bool operator==(const LearnedRule&) const = default;
};

using SlotBindings = std::map<std::string, Entity>;
using GoalTest = std::function<bool(const SimState&)>;

bool holds(const Literal& l, const SimState& s, const SlotBindings& b, bool goal_satisfied);
bool rule_matches(const LearnedRule& r, const SimState& s, const SlotBindings& b, bool goal_satisfied);

// candidates for `op`, most specific first, then earliest learned
std::vector<const LearnedRule*> matching_rules(const std::vector<LearnedRule>& rules, const std::string& op,
                                               const SimState& s, const SlotBindings& b, bool goal_satisfied);

struct ReplayStep {
  SimState before;
  world::PrimitiveAction action;
  SimState after;
};

// instructed steps between two episodes, each checked against the action model;
// every step starts from the episode recorded just before it, so instructor
// rearrangements in between do not count as divergence
std::vector<ReplayStep> replay_episodes(const memory::EpisodicMemory& em, std::uint64_t from, std::uint64_t to,
                                        const Workspace& ws);

// goal regression over an instructed, already replayed action sequence;
// actions off the regression path yield nothing
std::vector<LearnedRule> regress(const std::string& op, const std::vector<ReplayStep>& steps,
                                 const SlotBindings& b, const GoalTest& goal);

nlohmann::json rule_to_json(const LearnedRule& r);
LearnedRule rule_from_json(const nlohmann::json& j);

}  // namespace grounded::agent
