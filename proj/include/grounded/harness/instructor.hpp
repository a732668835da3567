#pragma once

#include <array>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "grounded/agent/agent.hpp"
#include "grounded/world/scene_spec.hpp"

namespace grounded::harness {

// ground truth for prepositions, on the instructor's side of the table
bool prep_oracle(const std::string& prep, const Box& primary, const Box& reference);
const std::vector<std::string>& oracle_preps();

struct Reply {
  std::string text;
  std::optional<world::ObjectId> click;
};

// a command the instructor wants carried out, with the goal it stands for
struct VerbTask {
  std::string verb;  // "move", "store", ...
  world::ObjectId target;
  std::string relation;  // canonical preposition of the goal
  std::string reference;  // object id text ("o3") or location name
  std::string command;
  std::string goal_sentence;
};

class ScriptedInstructor {
 public:
  ScriptedInstructor(world::Palette palette, std::map<world::ObjectId, world::TruthLabels> truth,
                     double superfluous_rate = 0, std::uint64_t seed = 0);

  // which words a description uses: any subset of color/size/shape; the
  // head is the shape word when shape is used, else "block"
  void set_description(bool size, bool color, bool shape);
  std::string describe(world::ObjectId id);
  std::string describe_entity(const std::string& ref);
  std::string word_for(world::ObjectId id, perception::PropertyKind p) const;
  std::optional<perception::PropertyKind> property_of(const std::string& word) const;
  std::string teaching_sentence(const std::string& word) const;

  VerbTask make_task(const std::string& verb, world::ObjectId target, const std::string& relation,
                     const std::string& reference);
  void begin_task(const VerbTask& t);
  void end_task() { task_.reset(); }
  bool goal_met(const VerbTask& t, const world::Scene& s) const;
  // some free spot on the table satisfies the goal
  bool feasible(const VerbTask& t, const world::Scene& s);
  std::optional<std::array<double, 2>> goal_pose(const VerbTask& t, const world::Scene& s);
  // next primitive in the teaching script, possibly a superfluous pointing
  std::string next_instruction(const world::Scene& s);
  int superfluous_given() const { return superfluous_given_; }

  // the answer to an agent question, or nothing if it asked none; asked for
  // an example of a preposition, the instructor may rearrange the table
  std::optional<Reply> answer(const dialog::Utterance& q, world::Scene& s);
  std::optional<Reply> prep_example(const std::string& prep, world::Scene& s);

  const std::map<world::ObjectId, world::TruthLabels>& truth() const { return truth_; }

 private:
  world::Palette palette_;
  std::map<world::ObjectId, world::TruthLabels> truth_;
  double superfluous_rate_ = 0;
  std::mt19937_64 rng_;
  bool use_size_ = true, use_color_ = true, use_shape_ = false;
  std::map<std::string, world::ObjectId> intended_;  // np text -> referent

  std::optional<VerbTask> task_;
  int task_step_ = 0;
  int point_at_step_ = -1;
  int superfluous_given_ = 0;
};

}  // namespace grounded::harness
