#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <variant>
#include <vector>

#include "grounded/agent/environment.hpp"
#include "grounded/agent/rules.hpp"
#include "grounded/dialog/dialog.hpp"
#include "grounded/language/lexicon.hpp"
#include "grounded/memory/episodic_memory.hpp"
#include "grounded/memory/semantic_memory.hpp"
#include "grounded/perception/classifier.hpp"
#include "json.hpp"

namespace grounded::agent {

struct Impasse {
  enum class Kind {
    UnknownWord,
    UnresolvedReference,
    NeedsExamples,  // word known but no perceptual support in the scene
    UnknownPrep,
    NoExecutionKnowledge,
    UnknownGoal,
  } kind = Kind::UnknownWord;
  std::string word;  // word, preposition, verb or np text
  std::string role;  // syntactic role of an unknown word
  std::string display;  // how to name an unresolved np when asking
  std::vector<world::ObjectId> candidates;
  bool operator==(const Impasse&) const = default;
};

const char* impasse_name(Impasse::Kind k);

using Resolution = std::variant<Entity, Impasse>;

struct GroundedCommand {
  std::string operator_id;
  SlotBindings slots;
  std::optional<GoalInstance> goal;
};

struct AgentConfig {
  std::uint64_t seed = 1;
  int max_steps = 8;          // executed rule actions per command before giving up
  int cycle_cap = 500;        // policy iterations per input
  int max_example_asks = 2;   // per word and command, before asking which object
  bool operator==(const AgentConfig&) const = default;
};

struct TimedMove {
  dialog::AgentMove move;
  std::uint64_t episode = 0;
};

struct CycleResult {
  std::vector<dialog::AgentMove> moves;  // utterances and actions only
  std::vector<dialog::TranscriptLine> transcript;
  std::vector<dialog::LearningEvent> learned;
  int agent_segments = 0;  // segments the agent opened this cycle
  std::vector<dialog::Purpose> opened;
  int questions = 0;       // agent utterances that expect a reply
  double seconds = 0;      // internal processing, arm time excluded

  std::vector<std::string> said() const;
  std::vector<world::PrimitiveAction> actions() const;
};

class Agent {
 public:
  Agent(Environment& env, AgentConfig cfg = {});

  CycleResult hear(const std::string& text);
  // gestural selection, held until an utterance with "this" consumes it
  void select(world::ObjectId id);
  std::optional<world::ObjectId> pending_click() const { return click_; }

  // grounding against the current observation; no dialog side effects
  Resolution resolve(const language::NounPhrase& np, std::optional<world::ObjectId> gesture = std::nullopt);
  bool goal_holds(const GoalInstance& g, const SimState& s) const;
  SimState sim_now() const;

  const dialog::InteractionStack& stack() const { return stack_; }
  const memory::SemanticMemory& semantic() const { return semantic_; }
  const memory::EpisodicMemory& episodic() const { return episodic_; }
  const language::Lexicon& lexicon() const { return lex_; }
  const std::vector<LearnedRule>& rules() const { return rules_; }
  const perception::PropertyClassifier& classifier(perception::PropertyKind p) const {
    return classifiers_[static_cast<int>(p)];
  }
  const std::vector<dialog::TranscriptLine>& transcript() const { return transcript_; }
  const std::vector<world::ObjectPercept>& percepts() const { return percepts_; }
  std::optional<std::string> symbol_of(world::ObjectId id, perception::PropertyKind p) const;
  // "the large red triangle", from whatever words the agent has for the object
  std::string describe(world::ObjectId id) const;
  const AgentConfig& config() const { return cfg_; }

  nlohmann::json save() const;
  void load(const nlohmann::json& j);
  nlohmann::json semantic_snapshot() const;

 private:
  struct Cycle;

  void observe();
  memory::EpisodeSnapshot snapshot() const;
  std::uint64_t record(std::optional<world::PrimitiveAction> a, std::optional<std::string> instructor,
                       std::optional<std::string> agent);
  void log(const std::string& segment, dialog::Event e, Cycle& c);
  void learn(dialog::Segment& seg, dialog::LearningKind k, std::string detail, Cycle& c);

  void route(const language::ParseResult& parse, dialog::DialogEvent ev, Cycle& c);
  void open_instructor_segment(const language::ParseResult& parse, Cycle& c, std::uint64_t ep,
                               const dialog::DialogEvent& ev);
  void never_mind(Cycle& c);
  void run(Cycle& c);
  void emit(const dialog::AgentMove& m, Cycle& c);
  void act(const dialog::AgentMove& m, Cycle& c);
  void pop(Cycle& c);
  void finish_reply(dialog::Segment& seg);

  void work(Cycle& c);
  void push_child(dialog::Purpose p, std::string subject, std::map<std::string, std::string> ctx, Cycle& c);
  void raise(const Impasse& imp, Cycle& c);
  void reply(dialog::Segment& seg, language::TemplateId t, language::Bindings b, const std::string& after);

  void work_word_property(Cycle& c);
  void work_teach_examples(Cycle& c);
  void work_learn_prep(Cycle& c);
  void work_acquire_goal(Cycle& c);
  void work_acquire_actions(Cycle& c);
  void work_resolve_reference(Cycle& c);
  void work_answer_query(Cycle& c);
  void work_command(Cycle& c);
  void after_action(Cycle& c);

  Resolution resolve_in(const language::NounPhrase& np, const dialog::Segment& seg,
                        const std::vector<world::ObjectId>* restrict_to = nullptr);
  std::optional<std::string> context_lookup(const dialog::Segment& seg, const std::string& key) const;
  std::optional<Box> box_of(const Entity& e, const SimState& s) const;

  struct Staged {
    std::optional<world::PrimitiveAction> action;
    std::optional<Impasse> impasse;
    std::string cannot;
  };
  Staged stage_primitive(const language::ParseResult& parse, const dialog::Segment& seg);
  std::optional<world::PrimitiveAction> place_for(world::ObjectId held, const std::string& relation,
                                                  const Entity& reference, const SimState& s);
  std::optional<world::PrimitiveAction> place_free(world::ObjectId held, const SimState& s) const;

  std::optional<memory::ActionConceptNetwork> network_for(const language::ParseResult& parse, bool create,
                                                          Cycle& c);
  std::optional<GoalInstance> ground_goal(const memory::ActionConceptNetwork& n, const SlotBindings& b) const;
  void compile(const memory::ActionConceptNetwork& n, const SlotBindings& b, std::uint64_t from, Cycle& c);

  Environment& env_;
  AgentConfig cfg_;
  language::Lexicon lex_;
  memory::SemanticMemory semantic_;
  memory::EpisodicMemory episodic_;
  std::array<perception::PropertyClassifier, 3> classifiers_;
  perception::SymbolFactory symbols_;
  std::vector<LearnedRule> rules_;
  dialog::InteractionStack stack_;
  std::vector<dialog::TranscriptLine> transcript_;
  std::mt19937_64 rng_;
  std::optional<world::ObjectId> click_;
  int networks_made_ = 0;
  int rules_made_ = 0;

  std::vector<world::ObjectPercept> percepts_;
  std::map<world::ObjectId, std::array<std::optional<std::string>, 3>> classified_;
  double act_seconds_ = 0;
};

}  // namespace grounded::agent
