#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "grounded/language/parser.hpp"
#include "grounded/language/templates.hpp"
#include "grounded/world/world.hpp"
#include "json.hpp"

namespace grounded::dialog {

enum class Purpose {
  LearnVerb,
  LearnWordProperty,
  TeachWordExamples,
  LearnPrep,
  AcquireGoal,
  AcquireActions,
  ResolveReference,
  ExecuteCommand,
  AnswerQuery,
  Idle,
};
inline constexpr Purpose kPurposes[] = {Purpose::LearnVerb,        Purpose::LearnWordProperty, Purpose::TeachWordExamples,
                                        Purpose::LearnPrep,        Purpose::AcquireGoal,       Purpose::AcquireActions,
                                        Purpose::ResolveReference, Purpose::ExecuteCommand,    Purpose::AnswerQuery,
                                        Purpose::Idle};

const char* purpose_name(Purpose p);
Purpose purpose_from_name(const std::string& s);
char purpose_letter(Purpose p);

enum class Originator { Agent, Instructor };
enum class Status { Open, Achieved, Abandoned };

// where the top segment stands; together with the purpose it selects the policy row
enum class Progress {
  Fresh,        // nothing done yet, or control just returned from a child
  Asked,        // a question is outstanding
  Received,     // the reply is stored and must be processed
  ActionReady,  // a primitive action is staged
  ReplyReady,   // an answer is staged
  Done,
};
inline constexpr Progress kProgress[] = {Progress::Fresh,       Progress::Asked,      Progress::Received,
                                         Progress::ActionReady, Progress::ReplyReady, Progress::Done};

const char* progress_name(Progress p);
Progress progress_from_name(const std::string& s);

enum class Speaker { Instructor, Agent };

enum class LearningKind { WordMap, PerceptTrain, PrepLearn, GoalLearn, RuleLearn };
const char* learning_kind_name(LearningKind k);
LearningKind learning_kind_from_name(const std::string& s);

// which purposes may host a learning event of each kind
bool purpose_permits(Purpose p, LearningKind k);

enum class DialogClass {
  VerbCommand,
  GoalDescription,
  TeachingExample,
  DescriptiveSentence,
  AttributeQuery,
  SpatialQuery,
  WhichAnswer,
  PropertyAnswer,
  NPFragment,
  YesNo,
  GetNextTask,
  NeverMind,
  Unparseable,
  AgentUtterance,
};
const char* dialog_class_name(DialogClass c);
DialogClass dialog_class_from_name(const std::string& s);

struct ActionEvent {
  world::PrimitiveAction action;
  bool operator==(const ActionEvent&) const = default;
};

struct DialogEvent {
  DialogClass cls = DialogClass::Unparseable;
  Speaker speaker = Speaker::Instructor;
  std::string text;
  std::optional<language::ParseResult> parse;
  bool operator==(const DialogEvent&) const = default;
};

struct LearningEvent {
  LearningKind kind = LearningKind::WordMap;
  std::string detail;
  bool operator==(const LearningEvent&) const = default;
};

struct Event {
  std::uint64_t episode = 0;
  std::variant<ActionEvent, DialogEvent, LearningEvent> body;
  bool operator==(const Event&) const = default;
};

const char* event_variant_name(const Event& e);

struct Utterance {
  language::TemplateId tmpl = language::TemplateId::Acknowledge;
  language::Bindings bindings;
  std::string text;
  bool operator==(const Utterance&) const = default;
};

Utterance make_utterance(language::TemplateId id, language::Bindings b = {});

struct Segment {
  std::string id;
  Purpose purpose = Purpose::Idle;
  Originator originator = Originator::Agent;
  std::string subject;  // word, verb, np text, or utterance text
  std::string parent;   // empty for roots
  std::map<std::string, std::string> context;
  std::vector<Event> events;
  Status status = Status::Open;
  Progress progress = Progress::Fresh;
  int children = 0;

  std::optional<language::ParseResult> request;  // utterance that opened the segment
  std::optional<language::ParseResult> reply;     // latest reply routed to it
  std::optional<world::PrimitiveAction> pending_action;
  std::optional<Utterance> pending_reply;

  std::optional<std::string> get(const std::string& key) const;
  bool operator==(const Segment&) const = default;
};

class InteractionStack {
 public:
  // child ids extend the parent's path, roots number per letter: A1, O11, P121
  Segment& push(Purpose purpose, Originator who, std::string subject);
  // throws PopUnachieved unless the top is Achieved
  Segment pop_achieved();
  Segment abandon_top();

  bool empty() const { return open_.empty(); }
  std::size_t size() const { return open_.size(); }
  Segment& top();
  const Segment& top() const;
  Segment& at(std::size_t i) { return open_.at(i); }
  const std::vector<Segment>& segments() const { return open_; }
  const std::vector<Segment>& closed() const { return closed_; }
  std::vector<std::string> ids() const;
  const Segment* parent_of(const Segment& s) const;
  Segment* find_open(const std::string& id);

  bool operator==(const InteractionStack&) const = default;

  friend nlohmann::json stack_to_json(const InteractionStack& s, bool with_closed);
  friend InteractionStack stack_from_json(const nlohmann::json& j);

 private:
  std::vector<Segment> open_;
  std::vector<Segment> closed_;
  std::map<char, int> roots_;
};

// DescriptiveSentence is reinterpreted by the segment it lands in
DialogEvent categorize(const language::ParseResult& parse, const InteractionStack& stack);

enum class MoveKind { Utterance, InternalGoal, ExternalAction, Wait };
const char* move_kind_name(MoveKind k);

enum class InternalGoal { None, Work, Pop };
const char* internal_goal_name(InternalGoal g);

struct PolicyEntry {
  MoveKind kind = MoveKind::Wait;
  std::optional<language::TemplateId> ask;  // question for Utterance rows opened by the agent
  InternalGoal goal = InternalGoal::None;
};

// total over Purpose x Progress
PolicyEntry policy(Purpose p, Progress g);

struct AgentMove {
  MoveKind kind = MoveKind::Wait;
  std::string segment;  // id of the segment it serves; empty for the idle row
  std::optional<Utterance> utterance;
  std::optional<world::PrimitiveAction> action;
  InternalGoal goal = InternalGoal::None;
  bool operator==(const AgentMove&) const = default;
};

AgentMove next_move(const InteractionStack& stack);

struct TranscriptLine {
  std::uint64_t episode_index = 0;
  std::string segment_id;
  std::string event_variant;  // action | dialog | learning
  nlohmann::json payload;
  bool operator==(const TranscriptLine&) const = default;
};

TranscriptLine transcript_line(const Event& e, const std::string& segment_id);
nlohmann::json transcript_line_to_json(const TranscriptLine& l);
TranscriptLine transcript_line_from_json(const nlohmann::json& j);

nlohmann::json event_to_json(const Event& e);
Event event_from_json(const nlohmann::json& j);
nlohmann::json utterance_to_json(const Utterance& u);
Utterance utterance_from_json(const nlohmann::json& j);
nlohmann::json segment_to_json(const Segment& s);
Segment segment_from_json(const nlohmann::json& j);
nlohmann::json stack_to_json(const InteractionStack& s, bool with_closed = false);
InteractionStack stack_from_json(const nlohmann::json& j);
nlohmann::json move_to_json(const AgentMove& m);

}  // namespace grounded::dialog
