#include "grounded/language/lexicon.hpp"

#include <algorithm>
#include <sstream>

#include "grounded/error.hpp"

namespace grounded::language {

namespace {

const std::set<std::string> kClosed = {
    "the", "a", "an", "is", "are", "to", "of", "this", "that", "what", "which", "where", "yes", "no",
    "it", "one", "object", "block", "thing", "item", "color", "size", "shape", "goal", "and", "or",
    "please", "ok", "okay", "done", "never", "mind", "i", "you", "me", "not", "all", "there", "do",
    "does", "should", "next"};

const std::vector<std::string> kPreps = {"left of", "right of", "to the left of", "to the right of",
                                         "in front of", "behind", "near", "far from", "next to",
                                         "in", "into", "inside", "on", "on top of", "under", "above"};

const std::map<std::string, std::string> kAliases = {
    {"to the left of", "left of"}, {"to the right of", "right of"}, {"into", "in"}, {"inside", "in"}, {"to", "in"}};

// primitive action verbs the parser knows the shape of
const std::vector<std::string> kVerbs = {"pick up", "put down", "point to", "put"};

bool longest_first(const std::vector<std::string>& a, const std::vector<std::string>& b) {
  return a.size() != b.size() ? a.size() > b.size() : a < b;
}

}  // namespace

const char* pos_name(PartOfSpeech p) {
  switch (p) {
    case PartOfSpeech::NounAdj: return "noun-adj";
    case PartOfSpeech::Preposition: return "preposition";
    case PartOfSpeech::Verb: return "verb";
  }
  return "?";
}

PartOfSpeech pos_from_name(const std::string& s) {
  for (auto p : {PartOfSpeech::NounAdj, PartOfSpeech::Preposition, PartOfSpeech::Verb})
    if (s == pos_name(p)) return p;
  throw FormatError("bad part of speech " + s);
}

std::vector<std::string> split_words(const std::string& s) {
  std::istringstream in(s);
  std::vector<std::string> out;
  for (std::string w; in >> w;) out.push_back(w);
  return out;
}

std::string join_words(const std::vector<std::string>& v, std::size_t from, std::size_t to) {
  std::string out;
  for (std::size_t i = from; i < std::min(to, v.size()); ++i) {
    if (!out.empty()) out += ' ';
    out += v[i];
  }
  return out;
}

bool is_generic_head(const std::string& w) {
  return w == "one" || w == "object" || w == "block" || w == "thing" || w == "item";
}
bool is_determiner(const std::string& w) { return w == "the" || w == "a" || w == "an"; }
bool is_property_word(const std::string& w) { return w == "color" || w == "size" || w == "shape"; }

Lexicon::Lexicon() : closed_(kClosed), aliases_(kAliases) {
  for (auto& p : kPreps) add_prep(p);
  // "move the block to the pantry": a bare "to" reads as "in", but stays closed-class
  preps_.push_back({"to"});
  std::sort(preps_.begin(), preps_.end(), longest_first);
  for (auto& v : kVerbs) {
    verbs_.push_back(split_words(v));
    open_[v] = PartOfSpeech::Verb;
  }
  std::sort(verbs_.begin(), verbs_.end(), longest_first);
}

void Lexicon::add_prep(const std::string& p) {
  auto toks = split_words(p);
  if (std::find(preps_.begin(), preps_.end(), toks) == preps_.end()) preps_.push_back(toks);
  std::sort(preps_.begin(), preps_.end(), longest_first);
  open_[p] = PartOfSpeech::Preposition;
}

std::optional<PartOfSpeech> Lexicon::pos(const std::string& w) const {
  auto it = open_.find(w);
  if (it == open_.end()) return std::nullopt;
  return it->second;
}

void Lexicon::register_word(const std::string& word, PartOfSpeech p) {
  if (closed_.count(word)) throw ClosedClassCollision("'" + word + "' is a closed-class word");
  if (p == PartOfSpeech::Preposition) {
    add_prep(word);
    return;
  }
  if (p == PartOfSpeech::Verb && split_words(word).size() > 1) {
    auto toks = split_words(word);
    if (std::find(verbs_.begin(), verbs_.end(), toks) == verbs_.end()) verbs_.push_back(toks);
    std::sort(verbs_.begin(), verbs_.end(), longest_first);
  }
  open_[word] = p;
}

std::string Lexicon::canonical_prep(const std::string& surface) const {
  auto it = aliases_.find(surface);
  return it == aliases_.end() ? surface : it->second;
}

nlohmann::json lexicon_to_json(const Lexicon& l) {
  nlohmann::json open = nlohmann::json::object();
  for (auto& [w, p] : l.open_class()) open[w] = pos_name(p);
  return {{"open_class", open}};
}

Lexicon lexicon_from_json(const nlohmann::json& j) {
  Lexicon l;
  for (auto& [w, p] : j.at("open_class").items()) l.register_word(w, pos_from_name(p.get<std::string>()));
  return l;
}

}  // namespace grounded::language
