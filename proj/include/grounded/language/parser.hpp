#pragma once

#include <optional>
#include <string>
#include <vector>

#include "grounded/language/lexicon.hpp"
#include "json.hpp"

namespace grounded::language {

enum class Category {
  VerbCommand,
  GoalDescription,
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
};

const char* category_name(Category c);

struct PrepPhrase;

struct NounPhrase {
  std::optional<std::string> determiner;
  std::vector<std::string> attributes;
  std::optional<std::string> head;          // content noun ("triangle", "pantry")
  std::optional<std::string> generic_head;  // "one", "object", "block"
  std::vector<PrepPhrase> pp;               // at most one embedded phrase
  bool gestural = false;

  // attribute words plus the content head, in utterance order
  std::vector<std::string> content_words() const;
  std::string text() const;
  bool operator==(const NounPhrase&) const;
};

struct PrepPhrase {
  std::string prep;  // canonical form
  NounPhrase object;
  bool operator==(const PrepPhrase&) const = default;
};

struct TokenRole {
  std::string token;
  std::string role;  // det, attr, head, generic, gesture, prep, verb, property, function, answer
  bool known = true;
  bool operator==(const TokenRole&) const = default;
};

struct ParseResult {
  Category category = Category::Unparseable;
  std::string text;
  std::optional<std::string> verb;
  std::optional<NounPhrase> subject;
  std::optional<NounPhrase> direct_object;
  std::vector<PrepPhrase> pps;
  std::optional<NounPhrase> predicate;  // "this is orange"
  std::optional<std::string> property_word;
  std::optional<bool> yes;
  bool wh = false;  // "what is left of the square"
  std::vector<std::string> unknown_words;
  std::vector<TokenRole> tokens;

  bool gestural() const;
  bool operator==(const ParseResult&) const;
};

ParseResult parse(const std::string& text, const Lexicon& lex);

std::vector<std::string> tokenize(const std::string& text);

nlohmann::json np_to_json(const NounPhrase& np);
NounPhrase np_from_json(const nlohmann::json& j);
nlohmann::json parse_to_json(const ParseResult& p);
ParseResult parse_from_json(const nlohmann::json& j);

}  // namespace grounded::language
