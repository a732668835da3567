#include "grounded/agent/agent.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numbers>
#include <set>
#include <sstream>

#include "grounded/error.hpp"
#include "grounded/spatial/spatial.hpp"

namespace grounded::agent {

using dialog::DialogClass;
using dialog::Event;
using dialog::Originator;
using dialog::Progress;
using dialog::Purpose;
using dialog::Segment;
using language::NounPhrase;
using language::ParseResult;
using language::TemplateId;
using perception::PropertyKind;
using world::ObjectId;

namespace {

using Clock = std::chrono::steady_clock;

double since(Clock::time_point t) { return std::chrono::duration<double>(Clock::now() - t).count(); }

const std::set<std::string> kPrimitiveVerbs{"pick up", "put down", "point to", "put"};

bool primitive_verb(const std::string& v) { return kPrimitiveVerbs.count(v) != 0; }

int pidx(PropertyKind p) { return static_cast<int>(p); }

bool expects(Purpose p, DialogClass c, const ParseResult& parse) {
  switch (p) {
    case Purpose::LearnWordProperty: return c == DialogClass::PropertyAnswer;
    case Purpose::TeachWordExamples: return c == DialogClass::TeachingExample && parse.predicate.has_value();
    case Purpose::LearnPrep: return c == DialogClass::TeachingExample && !parse.pps.empty() && parse.subject;
    case Purpose::AcquireGoal: return c == DialogClass::GoalDescription && parse.subject && !parse.pps.empty();
    case Purpose::AcquireActions: return c == DialogClass::VerbCommand;
    case Purpose::ResolveReference: return c == DialogClass::WhichAnswer || c == DialogClass::NPFragment;
    default: return false;
  }
}

// classes that can open a segment of their own while a question is outstanding
bool can_open(DialogClass c) {
  switch (c) {
    case DialogClass::VerbCommand:
    case DialogClass::DescriptiveSentence:
    case DialogClass::TeachingExample:
    case DialogClass::AttributeQuery:
    case DialogClass::SpatialQuery: return true;
    default: return false;
  }
}

std::string np_display(const NounPhrase& np) {
  std::vector<std::string> w = np.attributes;
  if (np.head) w.push_back(*np.head);
  else if (np.generic_head && *np.generic_head != "one") w.push_back(*np.generic_head);
  else w.push_back("object");
  return language::join_words(w);
}

// the whole footprint stays on the table, not just the centre
bool within_table(const SimObject& o, double x, double y, const Workspace& ws) {
  return x - o.bbox.x / 2 >= 0 && x + o.bbox.x / 2 <= ws.w && y - o.bbox.y / 2 >= 0 && y + o.bbox.y / 2 <= ws.d;
}

std::string join_ids(const std::vector<ObjectId>& ids) {
  std::string s;
  for (auto& i : ids) s += (s.empty() ? "" : ",") + i.str();
  return s;
}

std::vector<ObjectId> split_ids(const std::string& s) {
  std::vector<ObjectId> out;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ','))
    if (auto id = world::parse_object_id(tok)) out.push_back(*id);
  return out;
}

}  // namespace

const char* impasse_name(Impasse::Kind k) {
  switch (k) {
    case Impasse::Kind::UnknownWord: return "unknown-word";
    case Impasse::Kind::UnresolvedReference: return "unresolved-reference";
    case Impasse::Kind::NeedsExamples: return "needs-examples";
    case Impasse::Kind::UnknownPrep: return "unknown-prep";
    case Impasse::Kind::NoExecutionKnowledge: return "no-execution-knowledge";
    case Impasse::Kind::UnknownGoal: return "unknown-goal";
  }
  return "?";
}

std::vector<std::string> CycleResult::said() const {
  std::vector<std::string> out;
  for (auto& m : moves)
    if (m.utterance) out.push_back(m.utterance->text);
  return out;
}

std::vector<world::PrimitiveAction> CycleResult::actions() const {
  std::vector<world::PrimitiveAction> out;
  for (auto& m : moves)
    if (m.action) out.push_back(*m.action);
  return out;
}

struct Agent::Cycle {
  CycleResult out;
  bool said = false;
};

Agent::Agent(Environment& env, AgentConfig cfg)
    : env_(env),
      cfg_(cfg),
      classifiers_{perception::PropertyClassifier(PropertyKind::Color),
                   perception::PropertyClassifier(PropertyKind::Size),
                   perception::PropertyClassifier(PropertyKind::Shape)},
      rng_(cfg.seed) {}

// ---- perception and memory plumbing ----

void Agent::observe() {
  percepts_ = env_.observe();
  classified_.clear();
  for (auto& p : percepts_) {
    auto& row = classified_[p.id];
    for (auto k : perception::kProperties)
      if (auto c = classifiers_[pidx(k)].classify(p.features(k))) row[pidx(k)] = c->symbol.id;
  }
}

std::optional<std::string> Agent::symbol_of(ObjectId id, PropertyKind p) const {
  auto it = classified_.find(id);
  if (it == classified_.end()) return std::nullopt;
  return it->second[pidx(p)];
}

SimState Agent::sim_now() const { return sim_from_percepts(percepts_, env_.holding(), env_.workspace()); }

memory::EpisodeSnapshot Agent::snapshot() const {
  memory::EpisodeSnapshot s;
  for (auto& p : percepts_) {
    memory::PerceptSnapshot ps{p.id, p.pose, p.bbox, {}};
    if (auto it = classified_.find(p.id); it != classified_.end()) ps.symbols = it->second;
    s.objects.push_back(ps);
  }
  s.holding = env_.holding();
  if (!stack_.empty()) {
    s.top_segment = stack_.top().id;
    s.top_purpose = dialog::purpose_name(stack_.top().purpose);
  }
  s.world_tick = env_.tick();
  return s;
}

std::uint64_t Agent::record(std::optional<world::PrimitiveAction> a, std::optional<std::string> instructor,
                            std::optional<std::string> agent) {
  auto s = snapshot();
  s.action = std::move(a);
  s.instructor_utterance = std::move(instructor);
  s.agent_utterance = std::move(agent);
  return episodic_.record(std::move(s));
}

void Agent::log(const std::string& segment, Event e, Cycle& c) {
  if (!segment.empty())
    if (auto* s = stack_.find_open(segment)) s->events.push_back(e);
  auto line = dialog::transcript_line(e, segment);
  transcript_.push_back(line);
  c.out.transcript.push_back(std::move(line));
}

void Agent::learn(Segment& seg, dialog::LearningKind k, std::string detail, Cycle& c) {
  if (!dialog::purpose_permits(seg.purpose, k))
    throw AssertionFailure(std::string(dialog::learning_kind_name(k)) + " inside " + dialog::purpose_name(seg.purpose));
  dialog::LearningEvent le{k, std::move(detail)};
  c.out.learned.push_back(le);
  log(seg.id, Event{episodic_.size(), le}, c);
}

std::optional<std::string> Agent::context_lookup(const Segment& seg, const std::string& key) const {
  for (const Segment* s = &seg; s; s = stack_.parent_of(*s))
    if (auto v = s->get(key)) return v;
  return std::nullopt;
}

std::optional<Box> Agent::box_of(const Entity& e, const SimState& s) const {
  if (e.object) {
    if (auto* o = s.find(*e.object)) return o->box();
    return std::nullopt;
  }
  for (auto& l : env_.locations())
    if (l.name == e.location) return l.box();
  return std::nullopt;
}

// ---- input ----

void Agent::select(ObjectId id) {
  if (!env_.exists(id)) throw UnknownObject("no object " + id.str());
  click_ = id;
}

CycleResult Agent::hear(const std::string& text) {
  auto t0 = Clock::now();
  act_seconds_ = 0;
  Cycle c;
  if (language::tokenize(text).empty()) return c.out;
  observe();
  auto parse = language::parse(text, lex_);
  auto ev = dialog::categorize(parse, stack_);
  route(parse, ev, c);
  run(c);
  c.out.seconds = since(t0) - act_seconds_;
  return c.out;
}

void Agent::route(const ParseResult& parse, dialog::DialogEvent ev, Cycle& c) {
  auto ep = record(std::nullopt, parse.text, std::nullopt);
  auto capture = [&](Segment& s) {
    if (parse.gestural() && click_) {
      s.context["gesture"] = click_->str();
      click_.reset();
    }
  };

  if (ev.cls == DialogClass::NeverMind) {
    log(stack_.empty() ? "" : stack_.top().id, Event{ep, ev}, c);
    never_mind(c);
    return;
  }
  if (!stack_.empty() && stack_.top().progress == Progress::Asked) {
    auto& top = stack_.top();
    if (expects(top.purpose, ev.cls, parse)) {
      top.reply = parse;
      top.progress = Progress::Received;
      capture(top);
      log(top.id, Event{ep, ev}, c);
      return;
    }
    if (!can_open(ev.cls)) {
      log(top.id, Event{ep, ev}, c);
      reply(top, TemplateId::AskRephrase, {}, "fresh");
      return;
    }
  }
  open_instructor_segment(parse, c, ep, ev);
  if (!stack_.empty() && stack_.top().originator == Originator::Instructor && stack_.top().events.empty()) {
    capture(stack_.top());
    log(stack_.top().id, Event{ep, ev}, c);
  }
}

void Agent::open_instructor_segment(const ParseResult& parse, Cycle& c, std::uint64_t ep,
                                    const dialog::DialogEvent& ev) {
  auto say_idle = [&](TemplateId t) {
    log("", Event{ep, ev}, c);
    dialog::AgentMove m;
    m.kind = dialog::MoveKind::Utterance;
    m.utterance = dialog::make_utterance(t);
    emit(m, c);
  };
  switch (ev.cls) {
    case DialogClass::VerbCommand: {
      if (!parse.verb) return say_idle(TemplateId::AskRephrase);
      const auto& verb = *parse.verb;
      bool known = primitive_verb(verb);
      if (!known) {
        std::optional<std::string> prep;
        if (!parse.pps.empty()) prep = parse.pps[0].prep;
        bool dobj = parse.direct_object.has_value();
        auto n = semantic_.peek(memory::NetworkCue{verb, std::optional<std::optional<std::string>>(prep), dobj, {}});
        if (!n && prep)
          for (auto& e : semantic_.networks())
            if (e.network.verb == verb && e.network.has_direct_object == dobj && e.network.goal &&
                e.network.goal->from_command)
              n = e.network;
        known = n && n->goal && std::any_of(rules_.begin(), rules_.end(), [&](const LearnedRule& r) {
                  return r.operator_id == n->operator_id;
                });
      }
      auto& s = stack_.push(known ? Purpose::ExecuteCommand : Purpose::LearnVerb, Originator::Instructor, verb);
      s.request = parse;
      s.context["verb"] = verb;
      return;
    }
    case DialogClass::DescriptiveSentence:
    case DialogClass::TeachingExample: {
      if (parse.predicate) {
        auto& s = stack_.push(Purpose::TeachWordExamples, Originator::Instructor, parse.predicate->text());
        s.request = parse;
        s.progress = Progress::Received;
        auto words = parse.predicate->content_words();
        if (!words.empty()) s.context["word"] = words.front();
        return;
      }
      if (parse.subject && !parse.pps.empty()) {
        auto& s = stack_.push(Purpose::LearnPrep, Originator::Instructor, parse.pps[0].prep);
        s.request = parse;
        s.progress = Progress::Received;
        s.context["prep"] = parse.pps[0].prep;
        return;
      }
      return say_idle(TemplateId::AskRephrase);
    }
    case DialogClass::AttributeQuery:
    case DialogClass::SpatialQuery: {
      auto& s = stack_.push(Purpose::AnswerQuery, Originator::Instructor, parse.text);
      s.request = parse;
      s.progress = Progress::Received;
      return;
    }
    case DialogClass::YesNo: return say_idle(TemplateId::Acknowledge);
    case DialogClass::GetNextTask: log("", Event{ep, ev}, c); return;
    default: return say_idle(TemplateId::AskRephrase);
  }
}

void Agent::never_mind(Cycle& c) {
  while (!stack_.empty()) {
    auto s = stack_.abandon_top();
    if (s.originator == Originator::Instructor) break;
  }
  if (!stack_.empty() && stack_.top().progress == Progress::Asked) stack_.top().progress = Progress::Fresh;
  dialog::AgentMove m;
  m.kind = dialog::MoveKind::Utterance;
  m.utterance = dialog::make_utterance(TemplateId::Acknowledge);
  emit(m, c);
}

// ---- policy loop ----

void Agent::run(Cycle& c) {
  for (int i = 0; i < cfg_.cycle_cap; ++i) {
    auto m = dialog::next_move(stack_);
    if (stack_.empty()) {
      if (!c.said) emit(m, c);
      return;
    }
    switch (m.kind) {
      case dialog::MoveKind::Wait: return;
      case dialog::MoveKind::Utterance: emit(m, c); break;
      case dialog::MoveKind::ExternalAction: act(m, c); break;
      case dialog::MoveKind::InternalGoal:
        if (m.goal == dialog::InternalGoal::Pop) pop(c);
        else work(c);
        break;
    }
  }
}

void Agent::emit(const dialog::AgentMove& m, Cycle& c) {
  const auto& u = *m.utterance;
  auto ep = record(std::nullopt, std::nullopt, u.text);
  log(m.segment, Event{ep, dialog::DialogEvent{DialogClass::AgentUtterance, dialog::Speaker::Agent, u.text, {}}}, c);
  c.out.moves.push_back(m);
  c.said = true;
  if (m.segment.empty()) return;
  auto& top = stack_.top();
  if (top.progress == Progress::ReplyReady) {
    finish_reply(top);
  } else {
    top.progress = Progress::Asked;
    ++c.out.questions;
  }
}

void Agent::finish_reply(Segment& seg) {
  auto after = seg.get("after_reply").value_or("done");
  seg.context.erase("after_reply");
  seg.pending_reply.reset();
  if (after == "fresh") {
    seg.progress = Progress::Fresh;
  } else if (after == "abandon") {
    auto s = stack_.abandon_top();
    if (!stack_.empty() && stack_.top().progress == Progress::Asked) stack_.top().progress = Progress::Fresh;
  } else {
    seg.status = dialog::Status::Achieved;
    seg.progress = Progress::Done;
  }
}

void Agent::act(const dialog::AgentMove& m, Cycle& c) {
  auto& top = stack_.top();
  auto a = *m.action;
  top.pending_action.reset();
  auto t0 = Clock::now();
  try {
    env_.act(a);
  } catch (const Error&) {
    act_seconds_ += since(t0);
    reply(top, TemplateId::ReportCannot, {{"action", world::describe(a)}}, "abandon");
    return;
  }
  act_seconds_ += since(t0);
  observe();
  auto ep = record(a, std::nullopt, std::nullopt);
  log(top.id, Event{ep, dialog::ActionEvent{a}}, c);
  c.out.moves.push_back(m);
  after_action(c);
}

void Agent::after_action(Cycle&) {
  auto& top = stack_.top();
  bool own_step = (top.purpose == Purpose::LearnVerb || top.purpose == Purpose::ExecuteCommand) &&
                  !top.get("primitive");
  if (own_step) {
    top.context["steps"] = std::to_string(std::stoi(top.get("steps").value_or("0")) + 1);
    top.progress = Progress::Fresh;
    return;
  }
  top.status = dialog::Status::Achieved;
  top.progress = Progress::Done;
}

void Agent::pop(Cycle&) {
  stack_.top().status = dialog::Status::Achieved;
  auto s = stack_.pop_achieved();
  if (!stack_.empty() && s.originator == Originator::Instructor && stack_.top().progress == Progress::Asked)
    stack_.top().progress = Progress::Fresh;
}

void Agent::reply(Segment& seg, TemplateId t, language::Bindings b, const std::string& after) {
  seg.pending_reply = dialog::make_utterance(t, std::move(b));
  seg.context["after_reply"] = after;
  seg.progress = Progress::ReplyReady;
}

void Agent::push_child(Purpose p, std::string subject, std::map<std::string, std::string> ctx, Cycle& c) {
  auto& s = stack_.push(p, Originator::Agent, std::move(subject));
  s.context = std::move(ctx);
  ++c.out.agent_segments;
  c.out.opened.push_back(p);
}

void Agent::raise(const Impasse& imp, Cycle& c) {
  switch (imp.kind) {
    case Impasse::Kind::UnknownWord:
      return push_child(Purpose::LearnWordProperty, imp.word, {{"word", imp.word}}, c);
    case Impasse::Kind::UnresolvedReference:
      return push_child(Purpose::ResolveReference, imp.word,
                        {{"np", imp.display}, {"key", imp.word}, {"candidates", join_ids(imp.candidates)}}, c);
    case Impasse::Kind::NeedsExamples: {
      auto& top = stack_.top();
      auto key = "asks:" + imp.word;
      top.context[key] = std::to_string(std::stoi(top.get(key).value_or("0")) + 1);
      return push_child(Purpose::TeachWordExamples, imp.word, {{"word", imp.word}}, c);
    }
    case Impasse::Kind::UnknownPrep: return push_child(Purpose::LearnPrep, imp.word, {{"prep", imp.word}}, c);
    case Impasse::Kind::NoExecutionKnowledge:
      return push_child(Purpose::AcquireActions, imp.word, {{"verb", imp.word}}, c);
    case Impasse::Kind::UnknownGoal: return push_child(Purpose::AcquireGoal, imp.word, {{"verb", imp.word}}, c);
  }
}

void Agent::work(Cycle& c) {
  auto& top = stack_.top();
  try {
    switch (top.purpose) {
      case Purpose::LearnWordProperty: return work_word_property(c);
      case Purpose::TeachWordExamples: return work_teach_examples(c);
      case Purpose::LearnPrep: return work_learn_prep(c);
      case Purpose::AcquireGoal: return work_acquire_goal(c);
      case Purpose::AcquireActions: return work_acquire_actions(c);
      case Purpose::ResolveReference: return work_resolve_reference(c);
      case Purpose::AnswerQuery: return work_answer_query(c);
      case Purpose::LearnVerb:
      case Purpose::ExecuteCommand: return work_command(c);
      case Purpose::Idle: top.status = dialog::Status::Achieved; top.progress = Progress::Done; return;
    }
  } catch (const Error&) {
    auto& t = stack_.top();
    reply(t, TemplateId::ReportCannot, {{"action", t.subject}}, "abandon");
  }
}

// ---- reference resolution ----

Resolution Agent::resolve(const NounPhrase& np, std::optional<ObjectId> gesture) {
  Segment scratch;
  if (gesture) scratch.context["gesture"] = gesture->str();
  return resolve_in(np, scratch);
}

Resolution Agent::resolve_in(const NounPhrase& np, const Segment& seg, const std::vector<ObjectId>* restrict_to) {
  auto key = np.text();
  if (auto v = context_lookup(seg, "ref:" + key))
    if (auto e = parse_entity(*v)) return *e;

  std::vector<ObjectId> all;
  for (auto& p : percepts_) all.push_back(p.id);
  const auto& pool = restrict_to && !restrict_to->empty() ? *restrict_to : all;

  if (np.gestural) {
    if (auto g = context_lookup(seg, "gesture"))
      if (auto id = world::parse_object_id(*g)) return Entity::of(*id);
    return Impasse{Impasse::Kind::UnresolvedReference, key, "", "object", pool};
  }
  if (np.head && np.attributes.empty())
    for (auto& l : env_.locations())
      if (l.name == *np.head) return Entity::at(l.name);

  std::vector<ObjectId> cands = pool;
  std::optional<std::string> starved;
  auto words = np.content_words();
  for (std::size_t i = 0; i < words.size(); ++i) {
    const auto& w = words[i];
    auto wm = semantic_.retrieve(memory::WordCue{w, {}, {}});
    if (!wm) {
      bool head = np.head && i + 1 == words.size();
      return Impasse{Impasse::Kind::UnknownWord, w, head ? "head" : "attribute", "", {}};
    }
    std::vector<ObjectId> own;
    for (auto id : all)
      if (symbol_of(id, wm->property) == wm->symbol.id) own.push_back(id);
    if (own.empty() && !starved) starved = w;
    std::erase_if(cands, [&](ObjectId id) { return std::find(own.begin(), own.end(), id) == own.end(); });
  }
  if (!np.pp.empty()) {
    const auto& pp = np.pp.front();
    auto comp = semantic_.retrieve(memory::PrepCue{pp.prep});
    if (!comp) return Impasse{Impasse::Kind::UnknownPrep, pp.prep, "prep", "", {}};
    auto ref = resolve_in(pp.object, seg);
    if (auto* imp = std::get_if<Impasse>(&ref)) return *imp;
    auto& re = std::get<Entity>(ref);
    auto sim = sim_now();
    auto rb = box_of(re, sim);
    std::erase_if(cands, [&](ObjectId id) {
      if (re.object && *re.object == id) return true;
      auto* o = sim.find(id);
      return !o || !rb || !spatial::evaluate(comp->composition, o->box(), *rb, sim.ws);
    });
  }
  if (cands.size() == 1) return Entity::of(cands.front());
  if (cands.empty() && starved &&
      std::stoi(context_lookup(seg, "asks:" + *starved).value_or("0")) < cfg_.max_example_asks)
    return Impasse{Impasse::Kind::NeedsExamples, *starved, "", "", {}};
  return Impasse{Impasse::Kind::UnresolvedReference, key, "", np_display(np), cands.empty() ? pool : cands};
}

std::string Agent::describe(ObjectId id) const {
  std::vector<std::string> words;
  std::string noun = "object";
  for (auto p : {PropertyKind::Size, PropertyKind::Color, PropertyKind::Shape}) {
    auto sym = symbol_of(id, p);
    if (!sym) continue;
    auto wm = semantic_.peek(memory::WordCue{{}, *sym, {}});
    if (!wm) continue;
    if (p == PropertyKind::Shape) noun = wm->word;
    else words.push_back(wm->word);
  }
  words.push_back(noun);
  return "the " + language::join_words(words);
}

// ---- word learning ----

void Agent::work_word_property(Cycle& c) {
  auto& seg = stack_.top();
  if (!seg.reply || !seg.reply->property_word) {
    seg.progress = Progress::Fresh;
    return;
  }
  auto prop = perception::property_from_name(*seg.reply->property_word);
  seg.reply.reset();
  if (!prop) return reply(seg, TemplateId::AskRephrase, {}, "fresh");
  auto word = seg.get("word").value_or(seg.subject);
  if (!semantic_.peek(memory::WordCue{word, {}, *prop})) {
    auto sym = symbols_.new_symbol(*prop);
    semantic_.store(memory::WordMap{word, sym, *prop, 0, 0});
    if (!lex_.pos(word)) lex_.register_word(word, language::PartOfSpeech::NounAdj);
    learn(seg, dialog::LearningKind::WordMap,
          word + " -> " + sym.id + " (" + perception::property_name(*prop) + ")", c);
  }
  seg.status = dialog::Status::Achieved;
  seg.progress = Progress::Done;
  const Segment* parent = stack_.parent_of(seg);
  if (parent && parent->purpose == Purpose::TeachWordExamples) return;
  push_child(Purpose::TeachWordExamples, word, {{"word", word}}, c);
}

void Agent::work_teach_examples(Cycle& c) {
  auto& seg = stack_.top();
  const ParseResult* parse = seg.reply ? &*seg.reply : seg.request ? &*seg.request : nullptr;
  if (!parse) {
    seg.progress = Progress::Fresh;
    return;
  }
  if (!parse->predicate || !parse->subject || parse->predicate->content_words().empty()) {
    seg.reply.reset();
    return reply(seg, TemplateId::AskRephrase, {}, seg.originator == Originator::Agent ? "fresh" : "abandon");
  }
  auto words = parse->predicate->content_words();
  for (auto& w : words)
    if (!semantic_.peek(memory::WordCue{w, {}, {}}))
      return push_child(Purpose::LearnWordProperty, w, {{"word", w}}, c);

  auto r = resolve_in(*parse->subject, seg);
  if (auto* imp = std::get_if<Impasse>(&r)) return raise(*imp, c);
  auto e = std::get<Entity>(r);
  auto it = std::find_if(percepts_.begin(), percepts_.end(), [&](auto& p) { return e.object && p.id == *e.object; });
  if (it == percepts_.end()) {
    seg.reply.reset();
    return reply(seg, TemplateId::AskRephrase, {}, seg.originator == Originator::Agent ? "fresh" : "abandon");
  }
  auto& s = stack_.top();
  for (auto& w : words) {
    auto wm = semantic_.retrieve(memory::WordCue{w, {}, {}});
    classifiers_[pidx(wm->property)].train(wm->symbol, it->features(wm->property));
    learn(s, dialog::LearningKind::PerceptTrain, w + ": " + wm->symbol.id + " += " + it->id.str(), c);
  }
  for (auto& p : percepts_)
    for (auto k : perception::kProperties) {
      auto cl = classifiers_[pidx(k)].classify(p.features(k));
      classified_[p.id][pidx(k)] = cl ? std::optional<std::string>(cl->symbol.id) : std::nullopt;
    }
  if (s.originator == Originator::Instructor) return reply(s, TemplateId::Acknowledge, {}, "done");
  s.status = dialog::Status::Achieved;
  s.progress = Progress::Done;
}

// ---- prepositions ----

void Agent::work_learn_prep(Cycle& c) {
  auto& seg = stack_.top();
  const ParseResult* parse = seg.reply ? &*seg.reply : seg.request ? &*seg.request : nullptr;
  if (!parse) {
    seg.progress = Progress::Fresh;
    return;
  }
  bool agent = seg.originator == Originator::Agent;
  if (!parse->subject || parse->pps.empty()) {
    seg.reply.reset();
    return reply(seg, TemplateId::AskRephrase, {}, agent ? "fresh" : "abandon");
  }
  auto pp = parse->pps.front();
  auto subj = resolve_in(*parse->subject, seg);
  if (auto* imp = std::get_if<Impasse>(&subj)) return raise(*imp, c);
  auto ref = resolve_in(pp.object, seg);
  if (auto* imp = std::get_if<Impasse>(&ref)) return raise(*imp, c);
  auto sim = sim_now();
  auto pb = box_of(std::get<Entity>(subj), sim), rb = box_of(std::get<Entity>(ref), sim);
  auto& s = stack_.top();
  if (!pb || !rb || !std::get<Entity>(subj).is_object()) {
    s.reply.reset();
    return reply(s, TemplateId::AskRephrase, {}, agent ? "fresh" : "abandon");
  }
  auto prims = spatial::extract_primitives(*pb, *rb);
  auto existing = semantic_.peek(memory::PrepCue{pp.prep});
  auto comp = spatial::learn_example(existing ? std::optional(existing->composition) : std::nullopt, prims);
  semantic_.store(memory::PrepMap{pp.prep, comp, 0, 0});
  learn(s, dialog::LearningKind::PrepLearn, pp.prep + ": example " + std::to_string(comp.example_count), c);
  if (!agent) return reply(s, TemplateId::Acknowledge, {}, "done");
  if (s.get("prep") && *s.get("prep") != pp.prep) {
    s.reply.reset();
    s.progress = Progress::Fresh;
    return;
  }
  s.status = dialog::Status::Achieved;
  s.progress = Progress::Done;
}

// ---- verbs ----

std::optional<memory::ActionConceptNetwork> Agent::network_for(const ParseResult& parse, bool create, Cycle& c) {
  const auto& verb = *parse.verb;
  std::optional<std::string> prep;
  if (!parse.pps.empty()) prep = parse.pps[0].prep;
  bool dobj = parse.direct_object.has_value();
  if (auto n = semantic_.retrieve(memory::NetworkCue{verb, std::optional<std::optional<std::string>>(prep), dobj, {}}))
    return n;
  auto ids = [](memory::ActionConceptNetwork& n, int k) {
    n.map_id = "M" + std::to_string(k);
    n.lexical_id = "L" + std::to_string(k);
    n.operator_node_id = "P" + std::to_string(2 * k - 1);
    if (n.goal) {
      n.goal->node_id = "G" + std::to_string(2 * k);
      n.goal->predicate_id = "P" + std::to_string(2 * k);
    }
  };
  if (prep)
    for (auto& e : semantic_.networks()) {
      const auto& n = e.network;
      if (n.verb != verb || n.has_direct_object != dobj || !n.prep || !n.goal || !n.goal->from_command) continue;
      // same operator, the command's own preposition fills the goal relation
      auto derived = n;
      derived.prep = prep;
      ids(derived, ++networks_made_);
      semantic_.store(derived);
      return derived;
    }
  if (!create) return std::nullopt;

  memory::ActionConceptNetwork n;
  int k = ++networks_made_;
  ids(n, k);
  n.verb = verb;
  n.has_direct_object = dobj;
  n.prep = prep;
  n.operator_id = "op_" + std::to_string(k);
  int arg = 0;
  if (dobj) {
    ++arg;
    n.slots.push_back({"A" + std::to_string(k) + std::to_string(arg), "direct-object", "argument" + std::to_string(arg)});
  }
  if (prep) {
    ++arg;
    n.slots.push_back({"A" + std::to_string(k) + std::to_string(arg), "pp-object", "argument" + std::to_string(arg)});
  }
  semantic_.store(n);
  if (!lex_.pos(verb) && !lex_.is_closed(verb)) lex_.register_word(verb, language::PartOfSpeech::Verb);
  learn(stack_.top(), dialog::LearningKind::WordMap, verb + " -> " + n.map_id + " " + n.operator_id, c);
  return n;
}

std::optional<GoalInstance> Agent::ground_goal(const memory::ActionConceptNetwork& n, const SlotBindings& b) const {
  if (!n.goal) return std::nullopt;
  const auto& g = *n.goal;
  auto p = b.find(g.primary_slot);
  if (p == b.end() || !p->second.object) return std::nullopt;
  GoalInstance out;
  out.primary = *p->second.object;
  out.relation = g.from_command && n.prep ? *n.prep : g.relation;
  switch (g.reference.kind) {
    case memory::GoalRef::Kind::Slot: {
      auto r = b.find(g.reference.value);
      if (r == b.end()) return std::nullopt;
      out.reference = r->second;
      break;
    }
    case memory::GoalRef::Kind::Location: out.reference = Entity::at(g.reference.value); break;
    case memory::GoalRef::Kind::Object: {
      auto id = world::parse_object_id(g.reference.value);
      if (!id) return std::nullopt;
      out.reference = Entity::of(*id);
      break;
    }
  }
  return out;
}

bool Agent::goal_holds(const GoalInstance& g, const SimState& s) const {
  auto comp = semantic_.peek(memory::PrepCue{g.relation});
  if (!comp || comp->composition.example_count == 0) return false;
  auto* o = s.find(g.primary);
  auto rb = box_of(g.reference, s);
  if (!o || !rb) return false;
  return spatial::evaluate(comp->composition, o->box(), *rb, s.ws);
}

void Agent::work_acquire_goal(Cycle& c) {
  auto& seg = stack_.top();
  if (!seg.reply || !seg.reply->subject || seg.reply->pps.empty()) {
    seg.progress = Progress::Fresh;
    return;
  }
  auto parse = *seg.reply;
  auto pp = parse.pps.front();
  auto* parent = stack_.find_open(seg.parent);
  if (!parent || !parent->get("net_verb")) throw AssertionFailure("goal segment without a command");

  auto subj = resolve_in(*parse.subject, seg);
  if (auto* imp = std::get_if<Impasse>(&subj)) return raise(*imp, c);
  auto ref = resolve_in(pp.object, seg);
  if (auto* imp = std::get_if<Impasse>(&ref)) return raise(*imp, c);
  if (!semantic_.peek(memory::PrepCue{pp.prep}))
    return push_child(Purpose::LearnPrep, pp.prep, {{"prep", pp.prep}}, c);

  auto& s = stack_.top();
  parent = stack_.find_open(s.parent);
  std::optional<std::string> prep;
  if (auto p = parent->get("net_prep"); p && !p->empty()) prep = *p;
  auto net = semantic_.peek(memory::NetworkCue{*parent->get("net_verb"), std::optional<std::optional<std::string>>(prep),
                                               parent->get("net_dobj") == "1", {}});
  if (!net) throw AssertionFailure("no network for goal");
  SlotBindings b;
  for (auto& slot : net->slots)
    if (auto v = parent->get("slot:" + slot.id))
      if (auto e = parse_entity(*v)) b[slot.id] = *e;

  auto se = std::get<Entity>(subj), re = std::get<Entity>(ref);
  memory::GoalPattern g;
  for (auto& [id, e] : b)
    if (e == se) g.primary_slot = id;
  if (g.primary_slot.empty()) {
    s.reply.reset();
    return reply(s, TemplateId::AskRephrase, {}, "fresh");
  }
  std::string ref_slot;
  for (auto& [id, e] : b)
    if (e == re && id != g.primary_slot) ref_slot = id;
  if (!ref_slot.empty()) g.reference = {memory::GoalRef::Kind::Slot, ref_slot};
  else if (re.is_object()) g.reference = {memory::GoalRef::Kind::Object, re.str()};
  else g.reference = {memory::GoalRef::Kind::Location, re.location};
  auto* rs = ref_slot.empty() ? nullptr : net->slot(ref_slot);
  g.from_command = net->prep && *net->prep == pp.prep && rs && rs->role == "pp-object";
  g.relation = pp.prep;
  int k = std::stoi(net->map_id.substr(1));
  g.node_id = "G" + std::to_string(2 * k);
  g.predicate_id = "P" + std::to_string(2 * k);
  net->goal = g;
  semantic_.store(*net);
  learn(s, dialog::LearningKind::GoalLearn,
        net->verb + ": " + pp.prep + "(" + g.primary_slot + ", " + g.reference.value + ")", c);
  s.status = dialog::Status::Achieved;
  s.progress = Progress::Done;
}

void Agent::work_acquire_actions(Cycle& c) {
  auto& seg = stack_.top();
  if (!seg.reply) {
    seg.progress = Progress::Fresh;
    return;
  }
  if (!seg.reply->verb || !primitive_verb(*seg.reply->verb)) {
    seg.reply.reset();
    return reply(seg, TemplateId::AskRephrase, {}, "fresh");
  }
  auto parse = *seg.reply;
  auto st = stage_primitive(parse, seg);
  if (st.impasse) return raise(*st.impasse, c);
  auto& s = stack_.top();
  if (st.action) {
    s.pending_action = st.action;
    s.progress = Progress::ActionReady;
    return;
  }
  s.reply.reset();
  reply(s, TemplateId::ReportCannot, {{"action", st.cannot}}, "fresh");
}

void Agent::work_resolve_reference(Cycle& c) {
  auto& seg = stack_.top();
  if (!seg.reply) {
    seg.progress = Progress::Fresh;
    return;
  }
  const auto& parse = *seg.reply;
  std::optional<NounPhrase> np = parse.subject ? parse.subject : parse.direct_object;
  if (!np) {
    seg.reply.reset();
    return reply(seg, TemplateId::AskRephrase, {}, "fresh");
  }
  auto cands = split_ids(seg.get("candidates").value_or(""));
  auto r = resolve_in(*np, seg, &cands);
  if (auto* imp = std::get_if<Impasse>(&r)) {
    if (imp->kind == Impasse::Kind::UnresolvedReference) {
      auto& s = stack_.top();
      s.reply.reset();
      s.progress = Progress::Fresh;
      return;
    }
    return raise(*imp, c);
  }
  auto& s = stack_.top();
  if (auto* parent = stack_.find_open(s.parent)) parent->context["ref:" + s.get("key").value_or(s.subject)] =
      std::get<Entity>(r).str();
  s.status = dialog::Status::Achieved;
  s.progress = Progress::Done;
}

void Agent::work_answer_query(Cycle& c) {
  auto& seg = stack_.top();
  const auto& parse = *seg.request;
  if (parse.category == language::Category::AttributeQuery) {
    auto prop = parse.property_word ? perception::property_from_name(*parse.property_word) : std::nullopt;
    if (!prop || !parse.subject) return reply(seg, TemplateId::AskRephrase, {}, "done");
    auto r = resolve_in(*parse.subject, seg);
    if (auto* imp = std::get_if<Impasse>(&r)) return raise(*imp, c);
    auto& s = stack_.top();
    auto e = std::get<Entity>(r);
    if (!e.object) return reply(s, TemplateId::AnswerDontKnow, {}, "done");
    auto sym = symbol_of(*e.object, *prop);
    auto wm = sym ? semantic_.retrieve(memory::WordCue{{}, *sym, *prop}) : std::nullopt;
    if (wm) return reply(s, TemplateId::AnswerWord, {{"word", wm->word}}, "done");
    return reply(s, TemplateId::AnswerDontKnow, {}, "done");
  }
  if (parse.pps.empty()) return reply(seg, TemplateId::AskRephrase, {}, "done");
  const auto& pp = parse.pps.front();
  auto comp = semantic_.retrieve(memory::PrepCue{pp.prep});
  if (!comp) return push_child(Purpose::LearnPrep, pp.prep, {{"prep", pp.prep}}, c);
  auto ref = resolve_in(pp.object, seg);
  if (auto* imp = std::get_if<Impasse>(&ref)) return raise(*imp, c);
  auto re = std::get<Entity>(ref);
  auto sim = sim_now();
  auto rb = box_of(re, sim);
  if (parse.wh || !parse.subject) {
    std::vector<std::string> items;
    for (auto& o : sim.objects)
      if (!(re.object && *re.object == o.id) && rb && spatial::evaluate(comp->composition, o.box(), *rb, sim.ws))
        items.push_back(describe(o.id));
    auto& s = stack_.top();
    if (items.empty()) return reply(s, TemplateId::AnswerNothing, {}, "done");
    std::string list;
    for (auto& i : items) list += (list.empty() ? "" : ", ") + i;
    return reply(s, TemplateId::AnswerList, {{"items", list}}, "done");
  }
  auto subj = resolve_in(*parse.subject, seg);
  if (auto* imp = std::get_if<Impasse>(&subj)) return raise(*imp, c);
  auto& s = stack_.top();
  auto pb = box_of(std::get<Entity>(subj), sim);
  bool yes = pb && rb && spatial::evaluate(comp->composition, *pb, *rb, sim.ws);
  reply(s, yes ? TemplateId::AnswerYes : TemplateId::AnswerNo, {}, "done");
}

Agent::Staged Agent::stage_primitive(const ParseResult& parse, const Segment& seg) {
  Staged st;
  const auto& verb = *parse.verb;
  auto sim = sim_now();
  auto object_of = [&](const NounPhrase& np, std::optional<ObjectId>& out) -> bool {
    auto r = resolve_in(np, seg);
    if (auto* imp = std::get_if<Impasse>(&r)) {
      st.impasse = *imp;
      return false;
    }
    out = std::get<Entity>(r).object;
    return true;
  };
  std::string what = verb + (parse.direct_object ? " " + parse.direct_object->text() : "");

  if (verb == "pick up" || verb == "point to") {
    std::optional<ObjectId> id;
    if (!parse.direct_object) return st.cannot = what, st;
    if (!object_of(*parse.direct_object, id)) return st;
    if (!id) return st.cannot = what, st;
    world::PrimitiveAction a = verb == "pick up" ? world::PrimitiveAction(world::PickUp{*id})
                                                 : world::PrimitiveAction(world::PointTo{*id});
    if (action_model::blocked(sim, a)) return st.cannot = what, st;
    st.action = a;
    return st;
  }
  if (!sim.holding) return st.cannot = what, st;
  if (parse.direct_object) {
    std::optional<ObjectId> id;
    if (!object_of(*parse.direct_object, id)) return st;
    if (id != sim.holding) return st.cannot = what, st;
  }
  if (verb == "put down") {
    st.action = place_free(*sim.holding, sim);
    if (!st.action) st.cannot = what;
    return st;
  }
  if (parse.pps.empty()) return st.cannot = what, st;
  const auto& pp = parse.pps.front();
  if (!semantic_.peek(memory::PrepCue{pp.prep})) {
    st.impasse = Impasse{Impasse::Kind::UnknownPrep, pp.prep, "prep", "", {}};
    return st;
  }
  auto r = resolve_in(pp.object, seg);
  if (auto* imp = std::get_if<Impasse>(&r)) {
    st.impasse = *imp;
    return st;
  }
  st.action = place_for(*sim.holding, pp.prep, std::get<Entity>(r), sim);
  if (!st.action) st.cannot = what + " " + pp.prep + " " + pp.object.text();
  return st;
}

std::optional<world::PrimitiveAction> Agent::place_for(ObjectId held, const std::string& relation,
                                                       const Entity& reference, const SimState& s) {
  auto comp = semantic_.peek(memory::PrepCue{relation});
  auto* o = s.find(held);
  auto rb = box_of(reference, s);
  if (!comp || !o || !rb || comp->composition.example_count == 0) return std::nullopt;
  auto fits = [&](double x, double y) {
    if (!within_table(*o, x, y, s.ws)) return false;
    SimState after;
    try {
      after = action_model::apply(s, world::PutDown{x, y});
    } catch (const Error&) {
      return false;
    }
    auto* m = after.find(held);
    if (std::abs(m->pose.z - m->bbox.z / 2) > 1e-9) return false;
    return spatial::evaluate(comp->composition, m->box(), *rb, s.ws);
  };
  std::optional<Vec3> first;
  for (int i = 0; i < 16; ++i) {
    auto p = spatial::project(comp->composition, o->box(), *rb, s.ws, rng_).point;
    if (!first) first = p;
    if (fits(p.x, p.y)) return world::PutDown{p.x, p.y};
  }
  for (double r = 0.02; r <= 0.6 + 1e-9; r += 0.02)
    for (int k = 0; k < 16; ++k) {
      double th = 2 * std::numbers::pi * k / 16;
      double x = first->x + r * std::cos(th), y = first->y + r * std::sin(th);
      if (fits(x, y)) return world::PutDown{x, y};
    }
  return std::nullopt;
}

std::optional<world::PrimitiveAction> Agent::place_free(ObjectId held, const SimState& s) const {
  auto* o = s.find(held);
  if (!o) return std::nullopt;
  auto fits = [&](double x, double y) {
    if (!within_table(*o, x, y, s.ws)) return false;
    SimState after;
    try {
      after = action_model::apply(s, world::PutDown{x, y});
    } catch (const Error&) {
      return false;
    }
    if (std::abs(after.find(held)->pose.z - o->bbox.z / 2) > 1e-9) return false;
    for (auto& l : env_.locations()) {
      auto& r = l.region;
      if (x + o->bbox.x / 2 > r.x0 && x - o->bbox.x / 2 < r.x1 && y + o->bbox.y / 2 > r.y0 && y - o->bbox.y / 2 < r.y1)
        return false;
    }
    return true;
  };
  if (fits(o->pose.x, o->pose.y)) return world::PutDown{o->pose.x, o->pose.y};
  for (double r = 0.02; r <= 1.5; r += 0.02)
    for (int k = 0; k < 16; ++k) {
      double th = 2 * std::numbers::pi * k / 16;
      double x = o->pose.x + r * std::cos(th), y = o->pose.y + r * std::sin(th);
      if (fits(x, y)) return world::PutDown{x, y};
    }
  return std::nullopt;
}

void Agent::work_command(Cycle& c) {
  auto& seg = stack_.top();
  auto parse = *seg.request;
  const auto& verb = *parse.verb;
  if (primitive_verb(verb)) {
    seg.context["primitive"] = "1";
    auto st = stage_primitive(parse, seg);
    if (st.impasse) return raise(*st.impasse, c);
    auto& s = stack_.top();
    if (st.action) {
      s.pending_action = st.action;
      s.progress = Progress::ActionReady;
      return;
    }
    return reply(s, TemplateId::ReportCannot, {{"action", st.cannot}}, "done");
  }

  auto net = network_for(parse, seg.purpose == Purpose::LearnVerb, c);
  auto& s0 = stack_.top();
  if (!net) return reply(s0, TemplateId::ReportCannot, {{"action", parse.text}}, "done");
  s0.context["net_verb"] = net->verb;
  s0.context["net_prep"] = net->prep.value_or("");
  s0.context["net_dobj"] = net->has_direct_object ? "1" : "0";

  SlotBindings b;
  for (auto& slot : net->slots) {
    const NounPhrase* np = nullptr;
    if (slot.role == "direct-object" && parse.direct_object) np = &*parse.direct_object;
    if (slot.role == "pp-object" && !parse.pps.empty()) np = &parse.pps[0].object;
    if (!np) return reply(stack_.top(), TemplateId::ReportCannot, {{"action", parse.text}}, "done");
    auto r = resolve_in(*np, stack_.top());
    if (auto* imp = std::get_if<Impasse>(&r)) return raise(*imp, c);
    b[slot.id] = std::get<Entity>(r);
    stack_.top().context["slot:" + slot.id] = b[slot.id].str();
  }
  auto& s = stack_.top();
  if (!net->goal) return raise(Impasse{Impasse::Kind::UnknownGoal, verb, "verb", "", {}}, c);
  auto g = ground_goal(*net, b);
  if (!g) return reply(s, TemplateId::ReportCannot, {{"action", parse.text}}, "done");
  if (!semantic_.peek(memory::PrepCue{g->relation}))
    return raise(Impasse{Impasse::Kind::UnknownPrep, g->relation, "prep", "", {}}, c);

  auto sim = sim_now();
  if (goal_holds(*g, sim)) {
    if (auto from = s.get("start"); from && s.get("instructed")) compile(*net, b, std::stoull(*from), c);
    auto& done = stack_.top();
    done.status = dialog::Status::Achieved;
    done.progress = Progress::Done;
    return;
  }
  int steps = std::stoi(s.get("steps").value_or("0"));
  if (steps >= cfg_.max_steps) return reply(s, TemplateId::ReportCannot, {{"action", parse.text}}, "done");
  for (auto* r : matching_rules(rules_, net->operator_id, sim, b, false)) {
    std::optional<world::PrimitiveAction> a;
    auto bound = [&](const std::string& slot) { return b.count(slot) ? b.at(slot).object : std::nullopt; };
    switch (r->action.kind) {
      case ActionKind::PickUp:
        if (auto id = bound(r->action.slot)) a = world::PickUp{*id};
        break;
      case ActionKind::PointTo:
        if (auto id = bound(r->action.slot)) a = world::PointTo{*id};
        break;
      case ActionKind::PutDownGoal:
        if (sim.holding) a = place_for(*sim.holding, g->relation, g->reference, sim);
        break;
      case ActionKind::PutDownFree:
        if (sim.holding) a = place_free(*sim.holding, sim);
        break;
    }
    if (a && !action_model::blocked(sim, *a)) {
      s.pending_action = a;
      s.progress = Progress::ActionReady;
      return;
    }
  }
  if (!s.get("instructed")) {
    s.context["instructed"] = "1";
    s.context["start"] = std::to_string(episodic_.size());
  }
  raise(Impasse{Impasse::Kind::NoExecutionKnowledge, verb, "verb", "", {}}, c);
}

void Agent::compile(const memory::ActionConceptNetwork& n, const SlotBindings& b, std::uint64_t from, Cycle& c) {
  auto steps = replay_episodes(episodic_, std::max<std::uint64_t>(from, 1), episodic_.size(), env_.workspace());
  auto test = [&](const SimState& st) {
    auto g = ground_goal(n, b);
    return g && goal_holds(*g, st);
  };
  auto& seg = stack_.top();
  for (auto& r : regress(n.operator_id, steps, b, test)) {
    bool dup = std::any_of(rules_.begin(), rules_.end(), [&](const LearnedRule& x) {
      return x.operator_id == r.operator_id && x.conditions == r.conditions && x.action == r.action;
    });
    if (dup) continue;
    r.rule_id = "r" + std::to_string(++rules_made_);
    rules_.push_back(r);
    auto j = rule_to_json(r);
    learn(seg, dialog::LearningKind::RuleLearn, r.rule_id + ": " + j.at("text").get<std::string>(), c);
  }
}

// ---- persistence ----

nlohmann::json Agent::save() const {
  auto j = memory::semantic_to_json(semantic_);
  j["version"] = 1;
  j["lexicon"] = language::lexicon_to_json(lex_);
  nlohmann::json rules = nlohmann::json::array();
  for (auto& r : rules_) rules.push_back(rule_to_json(r));
  j["learned_rules"] = rules;
  nlohmann::json cls = nlohmann::json::array();
  for (auto& c : classifiers_) cls.push_back(perception::classifier_to_json(c));
  j["classifiers"] = cls;
  j["symbol_counters"] = symbols_.counters();
  j["episode_log"] = memory::episodic_to_json(episodic_);
  std::ostringstream rng;
  rng << rng_;
  j["rng_state"] = rng.str();
  j["stack"] = dialog::stack_to_json(stack_, true);
  nlohmann::json tr = nlohmann::json::array();
  for (auto& l : transcript_) tr.push_back(dialog::transcript_line_to_json(l));
  j["transcript"] = tr;
  j["counters"] = {{"networks", networks_made_}, {"rules", rules_made_}};
  j["pending_click"] = click_ ? nlohmann::json(click_->str()) : nlohmann::json(nullptr);
  j["config"] = {{"seed", cfg_.seed},
                 {"max_steps", cfg_.max_steps},
                 {"cycle_cap", cfg_.cycle_cap},
                 {"max_example_asks", cfg_.max_example_asks}};
  return j;
}

void Agent::load(const nlohmann::json& j) {
  if (j.value("version", 0) != 1) throw FormatError("unsupported agent save version");
  semantic_ = memory::semantic_from_json(j);
  lex_ = language::lexicon_from_json(j.at("lexicon"));
  rules_.clear();
  for (auto& r : j.at("learned_rules")) rules_.push_back(rule_from_json(r));
  for (std::size_t i = 0; i < 3; ++i) classifiers_[i] = perception::classifier_from_json(j.at("classifiers").at(i));
  symbols_.set_counters(j.at("symbol_counters").get<std::array<int, 3>>());
  episodic_ = j.contains("episode_log") ? memory::episodic_from_json(j.at("episode_log")) : memory::EpisodicMemory{};
  std::istringstream rng(j.at("rng_state").get<std::string>());
  rng >> rng_;
  stack_ = dialog::stack_from_json(j.at("stack"));
  transcript_.clear();
  for (auto& l : j.value("transcript", nlohmann::json::array())) transcript_.push_back(dialog::transcript_line_from_json(l));
  networks_made_ = j.at("counters").at("networks");
  rules_made_ = j.at("counters").at("rules");
  click_.reset();
  if (auto& pc = j.at("pending_click"); !pc.is_null()) click_ = world::parse_object_id(pc.get<std::string>());
  if (j.contains("config")) {
    auto& c = j.at("config");
    cfg_.seed = c.at("seed");
    cfg_.max_steps = c.at("max_steps");
    cfg_.cycle_cap = c.at("cycle_cap");
    cfg_.max_example_asks = c.at("max_example_asks");
  }
  percepts_.clear();
  classified_.clear();
}

nlohmann::json Agent::semantic_snapshot() const {
  auto j = memory::semantic_to_json(semantic_);
  nlohmann::json rules = nlohmann::json::array();
  for (auto& r : rules_) rules.push_back(rule_to_json(r));
  j["learned_rules"] = rules;
  nlohmann::json cls = nlohmann::json::array();
  for (auto& c : classifiers_) {
    nlohmann::json per = nlohmann::json::object();
    for (auto& e : c.examples()) per[e.symbol.id] = per.value(e.symbol.id, 0) + 1;
    cls.push_back({{"property", perception::property_name(c.property())},
                   {"examples", c.examples().size()},
                   {"per_symbol", per}});
  }
  j["classifiers"] = cls;
  return j;
}

}  // namespace grounded::agent
