#include "grounded/memory/semantic_memory.hpp"

#include <stdexcept>

#include "grounded/error.hpp"

namespace grounded::memory {

const ArgSlot* ActionConceptNetwork::slot(const std::string& id) const {
  for (auto& s : slots)
    if (s.id == id) return &s;
  return nullptr;
}

const ArgSlot* ActionConceptNetwork::slot_for_role(const std::string& role) const {
  for (auto& s : slots)
    if (s.role == role) return &s;
  return nullptr;
}

bool ActionConceptNetwork::valid() const {
  if (!goal) return true;
  if (!slot(goal->primary_slot)) return false;
  if (goal->reference.kind == GoalRef::Kind::Slot && !slot(goal->reference.value)) return false;
  if (goal->from_command && !prep) return false;
  return true;
}

namespace {

bool matches(const WordMap& m, const WordCue& c) {
  return (!c.word || *c.word == m.word) && (!c.symbol_id || *c.symbol_id == m.symbol.id) &&
         (!c.property || *c.property == m.property);
}
bool matches(const PrepMap& m, const PrepCue& c) { return !c.word || *c.word == m.word; }
bool matches(const ActionConceptNetwork& n, const NetworkCue& c) {
  return (!c.verb || *c.verb == n.verb) && (!c.prep || *c.prep == n.prep) &&
         (!c.has_direct_object || *c.has_direct_object == n.has_direct_object) &&
         (!c.operator_id || *c.operator_id == n.operator_id);
}

bool empty(const WordCue& c) { return !c.word && !c.symbol_id && !c.property; }
bool empty(const PrepCue& c) { return !c.word; }
bool empty(const NetworkCue& c) { return !c.verb && !c.prep && !c.has_direct_object && !c.operator_id; }

template <class Entry, class Cue, class Get>
long best(const std::vector<Entry>& v, const Cue& cue, Get get) {
  if (empty(cue)) throw std::invalid_argument("empty retrieval cue");
  long b = -1;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!matches(get(v[i]), cue)) continue;
    if (b < 0 || std::pair(v[i].frequency, v[i].recency) > std::pair(v[b].frequency, v[b].recency))
      b = static_cast<long>(i);
  }
  return b;
}

auto self = [](const auto& e) -> const auto& { return e; };
auto net_of = [](const SemanticMemory::NetworkEntry& e) -> const ActionConceptNetwork& { return e.network; };

}  // namespace

void SemanticMemory::store(WordMap m) {
  if (m.symbol.property != m.property) throw PropertyMismatch("word map symbol/property disagree");
  for (auto& w : words_) {
    if (w.word != m.word || w.property != m.property) continue;
    if (w.symbol != m.symbol)
      throw DuplicateKey("'" + m.word + "' already maps to " + w.symbol.id + " for " +
                         perception::property_name(m.property));
    w.recency = ++clock_;
    return;
  }
  m.recency = ++clock_;
  words_.push_back(std::move(m));
}

void SemanticMemory::store(PrepMap m) {
  for (auto& p : preps_)
    if (p.word == m.word) {
      p.composition = m.composition;
      p.recency = ++clock_;
      return;
    }
  m.recency = ++clock_;
  preps_.push_back(std::move(m));
}

void SemanticMemory::store(ActionConceptNetwork n) {
  if (!n.valid()) throw std::invalid_argument("network goal references undeclared slot");
  for (auto& e : nets_)
    if (e.network.verb == n.verb && e.network.prep == n.prep && e.network.has_direct_object == n.has_direct_object) {
      e.network = std::move(n);
      e.recency = ++clock_;
      return;
    }
  nets_.push_back({std::move(n), ++clock_, 0});
}

std::optional<WordMap> SemanticMemory::retrieve(const WordCue& cue) {
  long i = best(words_, cue, self);
  if (i < 0) return std::nullopt;
  ++words_[i].frequency;
  words_[i].recency = ++clock_;
  return words_[i];
}

std::optional<PrepMap> SemanticMemory::retrieve(const PrepCue& cue) {
  long i = best(preps_, cue, self);
  if (i < 0) return std::nullopt;
  ++preps_[i].frequency;
  preps_[i].recency = ++clock_;
  return preps_[i];
}

std::optional<ActionConceptNetwork> SemanticMemory::retrieve(const NetworkCue& cue) {
  long i = best(nets_, cue, net_of);
  if (i < 0) return std::nullopt;
  ++nets_[i].frequency;
  nets_[i].recency = ++clock_;
  return nets_[i].network;
}

std::optional<WordMap> SemanticMemory::peek(const WordCue& cue) const {
  long i = best(words_, cue, self);
  if (i < 0) return std::nullopt;
  return words_[i];
}

std::optional<PrepMap> SemanticMemory::peek(const PrepCue& cue) const {
  long i = best(preps_, cue, self);
  if (i < 0) return std::nullopt;
  return preps_[i];
}

std::optional<ActionConceptNetwork> SemanticMemory::peek(const NetworkCue& cue) const {
  long i = best(nets_, cue, net_of);
  if (i < 0) return std::nullopt;
  return nets_[i].network;
}

// ---- json ----

namespace {

const char* ref_kind(GoalRef::Kind k) {
  switch (k) {
    case GoalRef::Kind::Slot: return "slot";
    case GoalRef::Kind::Location: return "location";
    case GoalRef::Kind::Object: return "object";
  }
  return "?";
}

GoalRef::Kind ref_kind(const std::string& s) {
  if (s == "slot") return GoalRef::Kind::Slot;
  if (s == "location") return GoalRef::Kind::Location;
  if (s == "object") return GoalRef::Kind::Object;
  throw FormatError("bad goal reference kind " + s);
}

}  // namespace

nlohmann::json network_to_json(const ActionConceptNetwork& n) {
  nlohmann::json slots = nlohmann::json::array();
  for (auto& s : n.slots) slots.push_back({{"id", s.id}, {"role", s.role}, {"operator_arg", s.operator_arg}});
  nlohmann::json j = {{"map_id", n.map_id},
                      {"lexical_id", n.lexical_id},
                      {"operator_node_id", n.operator_node_id},
                      {"verb", n.verb},
                      {"has_direct_object", n.has_direct_object},
                      {"prep", n.prep ? nlohmann::json(*n.prep) : nlohmann::json(nullptr)},
                      {"operator_id", n.operator_id},
                      {"primitive", n.primitive},
                      {"slots", slots}};
  if (n.goal) {
    auto& g = *n.goal;
    j["goal"] = {{"node_id", g.node_id},
                 {"predicate_id", g.predicate_id},
                 {"from_command", g.from_command},
                 {"relation", g.relation},
                 {"primary_slot", g.primary_slot},
                 {"reference", {{"kind", ref_kind(g.reference.kind)}, {"value", g.reference.value}}}};
  } else {
    j["goal"] = nullptr;
  }
  return j;
}

ActionConceptNetwork network_from_json(const nlohmann::json& j) {
  ActionConceptNetwork n;
  n.map_id = j.at("map_id");
  n.lexical_id = j.at("lexical_id");
  n.operator_node_id = j.at("operator_node_id");
  n.verb = j.at("verb");
  n.has_direct_object = j.at("has_direct_object");
  if (!j.at("prep").is_null()) n.prep = j.at("prep").get<std::string>();
  n.operator_id = j.at("operator_id");
  n.primitive = j.at("primitive");
  for (auto& s : j.at("slots")) n.slots.push_back({s.at("id"), s.at("role"), s.at("operator_arg")});
  if (!j.at("goal").is_null()) {
    auto& g = j.at("goal");
    n.goal = GoalPattern{g.at("node_id"),
                         g.at("predicate_id"),
                         g.at("from_command"),
                         g.at("relation"),
                         g.at("primary_slot"),
                         {ref_kind(g.at("reference").at("kind").get<std::string>()), g.at("reference").at("value")}};
  }
  return n;
}

nlohmann::json semantic_to_json(const SemanticMemory& m) {
  nlohmann::json words = nlohmann::json::array(), preps = nlohmann::json::array(), nets = nlohmann::json::array();
  for (auto& w : m.words_)
    words.push_back({{"word", w.word},
                     {"symbol", w.symbol},
                     {"property", perception::property_name(w.property)},
                     {"recency", w.recency},
                     {"frequency", w.frequency}});
  for (auto& p : m.preps_) {
    auto c = spatial::composition_to_json(p.composition);
    c["word"] = p.word;
    c["recency"] = p.recency;
    c["frequency"] = p.frequency;
    preps.push_back(c);
  }
  for (auto& e : m.nets_)
    nets.push_back({{"network", network_to_json(e.network)}, {"recency", e.recency}, {"frequency", e.frequency}});
  return {{"word_maps", words}, {"prep_maps", preps}, {"networks", nets}, {"clock", m.clock_}};
}

SemanticMemory semantic_from_json(const nlohmann::json& j) {
  SemanticMemory m;
  for (auto& w : j.at("word_maps")) {
    auto p = perception::property_from_name(w.at("property").get<std::string>());
    if (!p) throw FormatError("bad word map property");
    m.words_.push_back({w.at("word"), w.at("symbol").get<PerceptSymbol>(), *p, w.at("recency"), w.at("frequency")});
  }
  for (auto& p : j.at("prep_maps"))
    m.preps_.push_back({p.at("word"), spatial::composition_from_json(p), p.at("recency"), p.at("frequency")});
  for (auto& e : j.at("networks"))
    m.nets_.push_back({network_from_json(e.at("network")), e.at("recency"), e.at("frequency")});
  m.clock_ = j.at("clock");
  return m;
}

}  // namespace grounded::memory
