#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "grounded/perception/classifier.hpp"
#include "grounded/spatial/spatial.hpp"
#include "json.hpp"

namespace grounded::memory {

using perception::PerceptSymbol;
using perception::PropertyKind;

struct WordMap {
  std::string word;
  PerceptSymbol symbol;
  PropertyKind property = PropertyKind::Color;
  std::uint64_t recency = 0;
  std::uint64_t frequency = 0;
  bool operator==(const WordMap&) const = default;
};

struct PrepMap {
  std::string word;
  spatial::SpatialComposition composition;
  std::uint64_t recency = 0;
  std::uint64_t frequency = 0;
  bool operator==(const PrepMap&) const = default;
};

struct ArgSlot {
  std::string id;    // A11
  std::string role;  // "direct-object" or "pp-object"
  std::string operator_arg;  // argument1, argument2
  bool operator==(const ArgSlot&) const = default;
};

struct GoalRef {
  enum class Kind { Slot, Location, Object } kind = Kind::Slot;
  std::string value;  // slot id, location name, or object id
  bool operator==(const GoalRef&) const = default;
};

struct GoalPattern {
  std::string node_id;       // G2
  std::string predicate_id;  // P2
  // from_command: the relation is the command's own preposition
  bool from_command = false;
  std::string relation;  // fixed preposition word when !from_command
  std::string primary_slot;
  GoalRef reference;
  bool operator==(const GoalPattern&) const = default;
};

struct ActionConceptNetwork {
  std::string map_id, lexical_id, operator_node_id;  // M1, L1, P1
  std::string verb;
  bool has_direct_object = false;
  std::optional<std::string> prep;
  std::string operator_id;  // op_1, op_pick-up, ...
  bool primitive = false;
  std::vector<ArgSlot> slots;
  std::optional<GoalPattern> goal;

  const ArgSlot* slot(const std::string& id) const;
  const ArgSlot* slot_for_role(const std::string& role) const;
  bool valid() const;  // goal references only declared slots
  bool operator==(const ActionConceptNetwork&) const = default;
};

struct WordCue {
  std::optional<std::string> word;
  std::optional<std::string> symbol_id;
  std::optional<PropertyKind> property;
};

struct PrepCue {
  std::optional<std::string> word;
};

struct NetworkCue {
  std::optional<std::string> verb;
  std::optional<std::optional<std::string>> prep;  // engaged nullopt matches "no preposition"
  std::optional<bool> has_direct_object;
  std::optional<std::string> operator_id;
};

class SemanticMemory {
 public:
  void store(WordMap m);
  void store(PrepMap m);
  void store(ActionConceptNetwork n);

  // best match by (frequency, recency); a hit counts as a use
  std::optional<WordMap> retrieve(const WordCue& cue);
  std::optional<PrepMap> retrieve(const PrepCue& cue);
  std::optional<ActionConceptNetwork> retrieve(const NetworkCue& cue);

  // same match without reinforcement
  std::optional<WordMap> peek(const WordCue& cue) const;
  std::optional<PrepMap> peek(const PrepCue& cue) const;
  std::optional<ActionConceptNetwork> peek(const NetworkCue& cue) const;

  const std::vector<WordMap>& word_maps() const { return words_; }
  const std::vector<PrepMap>& prep_maps() const { return preps_; }
  struct NetworkEntry {
    ActionConceptNetwork network;
    std::uint64_t recency = 0, frequency = 0;
    bool operator==(const NetworkEntry&) const = default;
  };
  const std::vector<NetworkEntry>& networks() const { return nets_; }
  std::uint64_t clock() const { return clock_; }
  bool operator==(const SemanticMemory&) const = default;

  friend nlohmann::json semantic_to_json(const SemanticMemory& m);
  friend SemanticMemory semantic_from_json(const nlohmann::json& j);

 private:
  std::vector<WordMap> words_;
  std::vector<PrepMap> preps_;
  std::vector<NetworkEntry> nets_;
  std::uint64_t clock_ = 0;
};

nlohmann::json network_to_json(const ActionConceptNetwork& n);
ActionConceptNetwork network_from_json(const nlohmann::json& j);
nlohmann::json semantic_to_json(const SemanticMemory& m);
SemanticMemory semantic_from_json(const nlohmann::json& j);

}  // namespace grounded::memory
