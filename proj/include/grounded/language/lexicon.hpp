#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "json.hpp"

namespace grounded::language {

enum class PartOfSpeech { NounAdj, Preposition, Verb };

const char* pos_name(PartOfSpeech p);
PartOfSpeech pos_from_name(const std::string& s);

class Lexicon {
 public:
  Lexicon();

  bool is_closed(const std::string& w) const { return closed_.count(w) != 0; }
  std::optional<PartOfSpeech> pos(const std::string& w) const;
  void register_word(const std::string& word, PartOfSpeech pos);

  const std::set<std::string>& closed_class() const { return closed_; }
  const std::map<std::string, PartOfSpeech>& open_class() const { return open_; }
  // token sequences, longest first
  const std::vector<std::vector<std::string>>& multiword_preps() const { return preps_; }
  const std::vector<std::vector<std::string>>& multiword_verbs() const { return verbs_; }
  // surface form -> canonical preposition ("to the left of" -> "left of")
  std::string canonical_prep(const std::string& surface) const;

  bool operator==(const Lexicon&) const = default;

 private:
  void add_prep(const std::string& p);

  std::set<std::string> closed_;
  std::map<std::string, PartOfSpeech> open_;
  std::vector<std::vector<std::string>> preps_;
  std::vector<std::vector<std::string>> verbs_;
  std::map<std::string, std::string> aliases_;
};

std::vector<std::string> split_words(const std::string& s);
std::string join_words(const std::vector<std::string>& v, std::size_t from = 0, std::size_t to = SIZE_MAX);

// words that name no attribute: "the red one", "this object"
bool is_generic_head(const std::string& w);
bool is_determiner(const std::string& w);
bool is_property_word(const std::string& w);

nlohmann::json lexicon_to_json(const Lexicon& l);
Lexicon lexicon_from_json(const nlohmann::json& j);

}  // namespace grounded::language
