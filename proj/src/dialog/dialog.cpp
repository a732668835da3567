#include "grounded/dialog/dialog.hpp"

#include <stdexcept>

#include "grounded/error.hpp"

namespace grounded::dialog {

using language::TemplateId;

namespace {

template <class E, std::size_t N>
E from_table(const std::string& s, const std::pair<E, const char*> (&table)[N], const char* what) {
  for (auto& [e, n] : table)
    if (s == n) return e;
  throw FormatError(std::string("unknown ") + what + " " + s);
}

template <class E, std::size_t N>
const char* to_name(E e, const std::pair<E, const char*> (&table)[N]) {
  for (auto& [v, n] : table)
    if (v == e) return n;
  return "?";
}

const std::pair<Purpose, const char*> kPurposeNames[] = {
    {Purpose::LearnVerb, "learn-verb"},
    {Purpose::LearnWordProperty, "learn-word-property"},
    {Purpose::TeachWordExamples, "teach-word-examples"},
    {Purpose::LearnPrep, "learn-prep"},
    {Purpose::AcquireGoal, "acquire-goal"},
    {Purpose::AcquireActions, "acquire-actions"},
    {Purpose::ResolveReference, "resolve-reference"},
    {Purpose::ExecuteCommand, "execute-command"},
    {Purpose::AnswerQuery, "answer-query"},
    {Purpose::Idle, "idle"},
};

const std::pair<Progress, const char*> kProgressNames[] = {
    {Progress::Fresh, "fresh"},          {Progress::Asked, "asked"},
    {Progress::Received, "received"},    {Progress::ActionReady, "action-ready"},
    {Progress::ReplyReady, "reply-ready"}, {Progress::Done, "done"},
};

const std::pair<LearningKind, const char*> kLearningNames[] = {
    {LearningKind::WordMap, "word-map"},     {LearningKind::PerceptTrain, "percept-train"},
    {LearningKind::PrepLearn, "prep-learn"}, {LearningKind::GoalLearn, "goal-learn"},
    {LearningKind::RuleLearn, "rule-learn"},
};

const std::pair<DialogClass, const char*> kClassNames[] = {
    {DialogClass::VerbCommand, "verb-command"},
    {DialogClass::GoalDescription, "goal-description"},
    {DialogClass::TeachingExample, "teaching-example"},
    {DialogClass::DescriptiveSentence, "descriptive-sentence"},
    {DialogClass::AttributeQuery, "attribute-query"},
    {DialogClass::SpatialQuery, "spatial-query"},
    {DialogClass::WhichAnswer, "which-answer"},
    {DialogClass::PropertyAnswer, "property-answer"},
    {DialogClass::NPFragment, "np-fragment"},
    {DialogClass::YesNo, "yes-no"},
    {DialogClass::GetNextTask, "get-next-task"},
    {DialogClass::NeverMind, "never-mind"},
    {DialogClass::Unparseable, "unparseable"},
    {DialogClass::AgentUtterance, "agent-utterance"},
};

const std::pair<Originator, const char*> kOriginNames[] = {{Originator::Agent, "agent"},
                                                           {Originator::Instructor, "instructor"}};
const std::pair<Status, const char*> kStatusNames[] = {
    {Status::Open, "open"}, {Status::Achieved, "achieved"}, {Status::Abandoned, "abandoned"}};
const std::pair<Speaker, const char*> kSpeakerNames[] = {{Speaker::Instructor, "instructor"},
                                                         {Speaker::Agent, "agent"}};

}  // namespace

const char* purpose_name(Purpose p) { return to_name(p, kPurposeNames); }
Purpose purpose_from_name(const std::string& s) { return from_table(s, kPurposeNames, "purpose"); }

char purpose_letter(Purpose p) {
  switch (p) {
    case Purpose::LearnVerb:
    case Purpose::AcquireActions: return 'A';
    case Purpose::LearnWordProperty:
    case Purpose::TeachWordExamples: return 'O';
    case Purpose::LearnPrep: return 'P';
    case Purpose::AcquireGoal: return 'G';
    case Purpose::ResolveReference: return 'R';
    case Purpose::ExecuteCommand: return 'E';
    case Purpose::AnswerQuery: return 'Q';
    case Purpose::Idle: return 'I';
  }
  return '?';
}

const char* progress_name(Progress p) { return to_name(p, kProgressNames); }
Progress progress_from_name(const std::string& s) { return from_table(s, kProgressNames, "progress"); }
const char* learning_kind_name(LearningKind k) { return to_name(k, kLearningNames); }
LearningKind learning_kind_from_name(const std::string& s) { return from_table(s, kLearningNames, "learning kind"); }
const char* dialog_class_name(DialogClass c) { return to_name(c, kClassNames); }
DialogClass dialog_class_from_name(const std::string& s) { return from_table(s, kClassNames, "dialog class"); }

bool purpose_permits(Purpose p, LearningKind k) {
  switch (k) {
    case LearningKind::WordMap: return p == Purpose::LearnWordProperty || p == Purpose::LearnVerb;
    case LearningKind::PerceptTrain: return p == Purpose::TeachWordExamples;
    case LearningKind::PrepLearn: return p == Purpose::LearnPrep;
    case LearningKind::GoalLearn: return p == Purpose::AcquireGoal;
    case LearningKind::RuleLearn: return p == Purpose::LearnVerb || p == Purpose::ExecuteCommand;
  }
  return false;
}

const char* event_variant_name(const Event& e) {
  switch (e.body.index()) {
    case 0: return "action";
    case 1: return "dialog";
    default: return "learning";
  }
}

Utterance make_utterance(TemplateId id, language::Bindings b) {
  Utterance u{id, std::move(b), ""};
  u.text = language::generate(id, u.bindings);
  return u;
}

std::optional<std::string> Segment::get(const std::string& key) const {
  auto it = context.find(key);
  if (it == context.end()) return std::nullopt;
  return it->second;
}

// ---- stack ----

Segment& InteractionStack::push(Purpose purpose, Originator who, std::string subject) {
  Segment s;
  s.purpose = purpose;
  s.originator = who;
  s.subject = std::move(subject);
  char letter = purpose_letter(purpose);
  if (open_.empty()) {
    s.id = letter + std::to_string(++roots_[letter]);
  } else {
    auto& parent = open_.back();
    s.parent = parent.id;
    s.id = letter + parent.id.substr(1) + std::to_string(++parent.children);
  }
  open_.push_back(std::move(s));
  return open_.back();
}

Segment InteractionStack::pop_achieved() {
  if (open_.empty()) throw PopUnachieved("stack is empty");
  if (open_.back().status != Status::Achieved)
    throw PopUnachieved("segment " + open_.back().id + " is not achieved");
  Segment s = std::move(open_.back());
  open_.pop_back();
  closed_.push_back(s);
  return s;
}

Segment InteractionStack::abandon_top() {
  if (open_.empty()) throw PopUnachieved("stack is empty");
  open_.back().status = Status::Abandoned;
  Segment s = std::move(open_.back());
  open_.pop_back();
  closed_.push_back(s);
  return s;
}

Segment& InteractionStack::top() {
  if (open_.empty()) throw std::out_of_range("empty interaction stack");
  return open_.back();
}

const Segment& InteractionStack::top() const {
  if (open_.empty()) throw std::out_of_range("empty interaction stack");
  return open_.back();
}

std::vector<std::string> InteractionStack::ids() const {
  std::vector<std::string> out;
  for (auto& s : open_) out.push_back(s.id);
  return out;
}

const Segment* InteractionStack::parent_of(const Segment& s) const {
  for (auto& o : open_)
    if (o.id == s.parent) return &o;
  return nullptr;
}

Segment* InteractionStack::find_open(const std::string& id) {
  for (auto& o : open_)
    if (o.id == id) return &o;
  return nullptr;
}

// ---- categorize ----

DialogEvent categorize(const language::ParseResult& parse, const InteractionStack& stack) {
  using language::Category;
  DialogEvent ev;
  ev.speaker = Speaker::Instructor;
  ev.text = parse.text;
  ev.parse = parse;
  switch (parse.category) {
    case Category::VerbCommand: ev.cls = DialogClass::VerbCommand; break;
    case Category::GoalDescription: ev.cls = DialogClass::GoalDescription; break;
    case Category::DescriptiveSentence: ev.cls = DialogClass::DescriptiveSentence; break;
    case Category::AttributeQuery: ev.cls = DialogClass::AttributeQuery; break;
    case Category::SpatialQuery: ev.cls = DialogClass::SpatialQuery; break;
    case Category::WhichAnswer: ev.cls = DialogClass::WhichAnswer; break;
    case Category::PropertyAnswer: ev.cls = DialogClass::PropertyAnswer; break;
    case Category::NPFragment: ev.cls = DialogClass::NPFragment; break;
    case Category::YesNo: ev.cls = DialogClass::YesNo; break;
    case Category::GetNextTask: ev.cls = DialogClass::GetNextTask; break;
    case Category::NeverMind: ev.cls = DialogClass::NeverMind; break;
    case Category::Unparseable: ev.cls = DialogClass::Unparseable; break;
  }
  if (ev.cls == DialogClass::DescriptiveSentence && !stack.empty()) {
    switch (stack.top().purpose) {
      case Purpose::AcquireGoal: ev.cls = DialogClass::GoalDescription; break;
      case Purpose::TeachWordExamples:
      case Purpose::LearnPrep: ev.cls = DialogClass::TeachingExample; break;
      default: break;
    }
  }
  return ev;
}

// ---- policy ----

const char* move_kind_name(MoveKind k) {
  switch (k) {
    case MoveKind::Utterance: return "utterance";
    case MoveKind::InternalGoal: return "internal-goal";
    case MoveKind::ExternalAction: return "external-action";
    case MoveKind::Wait: return "wait";
  }
  return "?";
}

const char* internal_goal_name(InternalGoal g) {
  switch (g) {
    case InternalGoal::None: return "none";
    case InternalGoal::Work: return "work";
    case InternalGoal::Pop: return "pop";
  }
  return "?";
}

PolicyEntry policy(Purpose p, Progress g) {
  switch (g) {
    case Progress::Asked: return {MoveKind::Wait, std::nullopt, InternalGoal::None};
    case Progress::Received: return {MoveKind::InternalGoal, std::nullopt, InternalGoal::Work};
    case Progress::ActionReady: return {MoveKind::ExternalAction, std::nullopt, InternalGoal::None};
    case Progress::ReplyReady: return {MoveKind::Utterance, std::nullopt, InternalGoal::None};
    case Progress::Done: return {MoveKind::InternalGoal, std::nullopt, InternalGoal::Pop};
    case Progress::Fresh: break;
  }
  auto ask = [](TemplateId t) { return PolicyEntry{MoveKind::Utterance, t, InternalGoal::None}; };
  switch (p) {
    case Purpose::LearnWordProperty: return ask(TemplateId::AskProperty);
    case Purpose::TeachWordExamples: return ask(TemplateId::AskExample);
    case Purpose::LearnPrep: return ask(TemplateId::AskPrepExample);
    case Purpose::AcquireGoal: return ask(TemplateId::AskGoal);
    case Purpose::AcquireActions: return ask(TemplateId::AskNextAction);
    case Purpose::ResolveReference: return ask(TemplateId::AskWhich);
    case Purpose::Idle: return ask(TemplateId::AskNextTask);
    case Purpose::LearnVerb:
    case Purpose::ExecuteCommand:
    case Purpose::AnswerQuery: return {MoveKind::InternalGoal, std::nullopt, InternalGoal::Work};
  }
  return {MoveKind::Wait, std::nullopt, InternalGoal::None};
}

AgentMove next_move(const InteractionStack& stack) {
  AgentMove m;
  if (stack.empty()) {
    m.kind = MoveKind::Utterance;
    m.utterance = make_utterance(TemplateId::AskNextTask);
    return m;
  }
  const auto& top = stack.top();
  auto row = policy(top.purpose, top.progress);
  m.kind = row.kind;
  m.segment = top.id;
  m.goal = row.goal;
  switch (row.kind) {
    case MoveKind::Utterance:
      if (row.ask) {
        language::Bindings b(top.context.begin(), top.context.end());
        m.utterance = make_utterance(*row.ask, b);
      } else if (top.pending_reply) {
        m.utterance = top.pending_reply;
      } else {
        m.utterance = make_utterance(TemplateId::AskRephrase);
      }
      break;
    case MoveKind::ExternalAction:
      if (top.pending_action) {
        m.action = top.pending_action;
      } else {
        m.kind = MoveKind::InternalGoal;
        m.goal = InternalGoal::Work;
      }
      break;
    default: break;
  }
  return m;
}

// ---- json ----

nlohmann::json utterance_to_json(const Utterance& u) {
  return {{"template", language::template_info(u.tmpl).name}, {"bindings", u.bindings}, {"text", u.text}};
}

Utterance utterance_from_json(const nlohmann::json& j) {
  return {language::template_from_name(j.at("template").get<std::string>()),
          j.at("bindings").get<language::Bindings>(), j.at("text")};
}

nlohmann::json event_to_json(const Event& e) {
  nlohmann::json j = {{"episode", e.episode}, {"variant", event_variant_name(e)}};
  if (auto* a = std::get_if<ActionEvent>(&e.body)) {
    j["action"] = a->action;
  } else if (auto* d = std::get_if<DialogEvent>(&e.body)) {
    j["class"] = dialog_class_name(d->cls);
    j["speaker"] = to_name(d->speaker, kSpeakerNames);
    j["text"] = d->text;
    j["parse"] = d->parse ? language::parse_to_json(*d->parse) : nlohmann::json(nullptr);
  } else {
    auto& l = std::get<LearningEvent>(e.body);
    j["kind"] = learning_kind_name(l.kind);
    j["detail"] = l.detail;
  }
  return j;
}

Event event_from_json(const nlohmann::json& j) {
  Event e;
  e.episode = j.at("episode");
  auto v = j.at("variant").get<std::string>();
  if (v == "action") {
    e.body = ActionEvent{j.at("action").get<world::PrimitiveAction>()};
  } else if (v == "dialog") {
    DialogEvent d;
    d.cls = dialog_class_from_name(j.at("class"));
    d.speaker = from_table(j.at("speaker").get<std::string>(), kSpeakerNames, "speaker");
    d.text = j.at("text");
    if (!j.at("parse").is_null()) d.parse = language::parse_from_json(j.at("parse"));
    e.body = d;
  } else if (v == "learning") {
    e.body = LearningEvent{learning_kind_from_name(j.at("kind")), j.at("detail")};
  } else {
    throw FormatError("unknown event variant " + v);
  }
  return e;
}

TranscriptLine transcript_line(const Event& e, const std::string& segment_id) {
  TranscriptLine l{e.episode, segment_id, event_variant_name(e), nullptr};
  auto j = event_to_json(e);
  j.erase("episode");
  j.erase("variant");
  j.erase("parse");
  l.payload = j;
  return l;
}

nlohmann::json transcript_line_to_json(const TranscriptLine& l) {
  return {{"episode_index", l.episode_index},
          {"segment_id", l.segment_id},
          {"event_variant", l.event_variant},
          {"payload", l.payload}};
}

TranscriptLine transcript_line_from_json(const nlohmann::json& j) {
  return {j.at("episode_index"), j.at("segment_id"), j.at("event_variant"), j.at("payload")};
}

nlohmann::json segment_to_json(const Segment& s) {
  nlohmann::json events = nlohmann::json::array();
  for (auto& e : s.events) events.push_back(event_to_json(e));
  auto opt_parse = [](const std::optional<language::ParseResult>& p) {
    return p ? language::parse_to_json(*p) : nlohmann::json(nullptr);
  };
  return {{"id", s.id},
          {"purpose", purpose_name(s.purpose)},
          {"originator", to_name(s.originator, kOriginNames)},
          {"subject", s.subject},
          {"parent", s.parent.empty() ? nlohmann::json(nullptr) : nlohmann::json(s.parent)},
          {"context", s.context},
          {"events", events},
          {"status", to_name(s.status, kStatusNames)},
          {"progress", progress_name(s.progress)},
          {"children", s.children},
          {"request", opt_parse(s.request)},
          {"reply", opt_parse(s.reply)},
          {"pending_action", s.pending_action ? nlohmann::json(*s.pending_action) : nlohmann::json(nullptr)},
          {"pending_reply", s.pending_reply ? utterance_to_json(*s.pending_reply) : nlohmann::json(nullptr)}};
}

Segment segment_from_json(const nlohmann::json& j) {
  Segment s;
  s.id = j.at("id");
  s.purpose = purpose_from_name(j.at("purpose"));
  s.originator = from_table(j.at("originator").get<std::string>(), kOriginNames, "originator");
  s.subject = j.at("subject");
  if (!j.at("parent").is_null()) s.parent = j.at("parent");
  s.context = j.at("context").get<std::map<std::string, std::string>>();
  for (auto& e : j.at("events")) s.events.push_back(event_from_json(e));
  s.status = from_table(j.at("status").get<std::string>(), kStatusNames, "status");
  s.progress = progress_from_name(j.at("progress"));
  s.children = j.at("children");
  if (!j.at("request").is_null()) s.request = language::parse_from_json(j.at("request"));
  if (!j.at("reply").is_null()) s.reply = language::parse_from_json(j.at("reply"));
  if (!j.at("pending_action").is_null()) s.pending_action = j.at("pending_action").get<world::PrimitiveAction>();
  if (!j.at("pending_reply").is_null()) s.pending_reply = utterance_from_json(j.at("pending_reply"));
  return s;
}

nlohmann::json stack_to_json(const InteractionStack& s, bool with_closed) {
  nlohmann::json open = nlohmann::json::array(), roots = nlohmann::json::object();
  for (auto& seg : s.open_) open.push_back(segment_to_json(seg));
  for (auto& [c, n] : s.roots_) roots[std::string(1, c)] = n;
  nlohmann::json j = {{"segments", open}, {"top", s.open_.empty() ? nlohmann::json(nullptr) : nlohmann::json(s.open_.back().id)},
                      {"roots", roots}};
  if (with_closed) {
    nlohmann::json closed = nlohmann::json::array();
    for (auto& seg : s.closed_) closed.push_back(segment_to_json(seg));
    j["closed"] = closed;
  }
  return j;
}

InteractionStack stack_from_json(const nlohmann::json& j) {
  InteractionStack s;
  for (auto& seg : j.at("segments")) s.open_.push_back(segment_from_json(seg));
  for (auto& [k, v] : j.at("roots").items()) s.roots_[k.at(0)] = v.get<int>();
  if (j.contains("closed"))
    for (auto& seg : j.at("closed")) s.closed_.push_back(segment_from_json(seg));
  return s;
}

nlohmann::json move_to_json(const AgentMove& m) {
  return {{"kind", move_kind_name(m.kind)},
          {"segment", m.segment},
          {"utterance", m.utterance ? utterance_to_json(*m.utterance) : nlohmann::json(nullptr)},
          {"action", m.action ? nlohmann::json(*m.action) : nlohmann::json(nullptr)},
          {"goal", internal_goal_name(m.goal)}};
}

}  // namespace grounded::dialog
