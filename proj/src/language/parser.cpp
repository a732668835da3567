#include "grounded/language/parser.hpp"

#include <algorithm>
#include <cctype>

#include "grounded/error.hpp"

namespace grounded::language {

const char* category_name(Category c) {
  switch (c) {
    case Category::VerbCommand: return "verb-command";
    case Category::GoalDescription: return "goal-description";
    case Category::DescriptiveSentence: return "descriptive-sentence";
    case Category::AttributeQuery: return "attribute-query";
    case Category::SpatialQuery: return "spatial-query";
    case Category::WhichAnswer: return "which-answer";
    case Category::PropertyAnswer: return "property-answer";
    case Category::NPFragment: return "np-fragment";
    case Category::YesNo: return "yes-no";
    case Category::GetNextTask: return "get-next-task";
    case Category::NeverMind: return "never-mind";
    case Category::Unparseable: return "unparseable";
  }
  return "?";
}

std::vector<std::string> NounPhrase::content_words() const {
  auto out = attributes;
  if (head) out.push_back(*head);
  return out;
}

std::string NounPhrase::text() const {
  std::vector<std::string> w;
  if (gestural) w.push_back("this");
  if (determiner) w.push_back(*determiner);
  for (auto& a : attributes) w.push_back(a);
  if (head) w.push_back(*head);
  if (generic_head) w.push_back(*generic_head);
  for (auto& p : pp) {
    w.push_back(p.prep);
    w.push_back(p.object.text());
  }
  return join_words(w);
}

bool NounPhrase::operator==(const NounPhrase& o) const {
  return determiner == o.determiner && attributes == o.attributes && head == o.head &&
         generic_head == o.generic_head && pp == o.pp && gestural == o.gestural;
}

bool ParseResult::gestural() const {
  auto g = [](const std::optional<NounPhrase>& n) { return n && n->gestural; };
  return g(subject) || g(direct_object) || g(predicate);
}

bool ParseResult::operator==(const ParseResult& o) const {
  return category == o.category && text == o.text && verb == o.verb && subject == o.subject &&
         direct_object == o.direct_object && pps == o.pps && predicate == o.predicate &&
         property_word == o.property_word && yes == o.yes && wh == o.wh && unknown_words == o.unknown_words &&
         tokens == o.tokens;
}

std::vector<std::string> tokenize(const std::string& text) {
  std::vector<std::string> out;
  for (auto w : split_words(text)) {
    std::transform(w.begin(), w.end(), w.begin(), [](unsigned char c) { return std::tolower(c); });
    auto punct = [](unsigned char c) { return std::ispunct(c) != 0; };
    while (!w.empty() && punct(w.back())) w.pop_back();
    std::size_t s = 0;
    while (s < w.size() && punct(w[s])) ++s;
    w = w.substr(s);
    if (!w.empty()) out.push_back(w);
  }
  return out;
}

namespace {

struct Unit {
  enum Kind { Word, Prep, Verb } kind;
  std::string text;
  std::size_t first, count;
};

class Parser {
 public:
  Parser(const std::vector<std::string>& toks, const Lexicon& lex) : toks_(toks), lex_(lex) {
    role_.assign(toks.size(), "");
    for (std::size_t i = 0; i < toks.size();) {
      auto match = [&](const std::vector<std::vector<std::string>>& forms) -> std::size_t {
        for (auto& f : forms)
          if (i + f.size() <= toks.size() && std::equal(f.begin(), f.end(), toks.begin() + i)) return f.size();
        return 0;
      };
      std::size_t n = 0;
      if (i == 0 && (n = match(lex.multiword_verbs())) > 0) {
        units_.push_back({Unit::Verb, join_words(toks, i, i + n), i, n});
      } else if ((n = match(lex.multiword_preps())) > 0) {
        units_.push_back({Unit::Prep, lex.canonical_prep(join_words(toks, i, i + n)), i, n});
      } else {
        n = 1;
        units_.push_back({Unit::Word, toks[i], i, 1});
      }
      i += n;
    }
  }

  ParseResult run(const std::string& text) {
    ParseResult r;
    r.text = text;
    using Try = bool (Parser::*)(ParseResult&);
    for (Try t : {&Parser::never_mind, &Parser::yes_no, &Parser::next_task, &Parser::property_answer,
                  &Parser::attribute_query, &Parser::wh_spatial, &Parser::spatial_yn, &Parser::goal,
                  &Parser::which_answer, &Parser::this_is, &Parser::descriptive, &Parser::command,
                  &Parser::fragment}) {
      ParseResult cand = r;
      auto saved = role_;
      if ((this->*t)(cand)) {
        r = std::move(cand);
        finish(r);
        return r;
      }
      role_ = saved;
    }
    r.category = Category::Unparseable;
    role_.assign(toks_.size(), "");
    finish(r);
    return r;
  }

 private:
  static constexpr std::size_t npos = SIZE_MAX;

  bool end(std::size_t i) const { return i == units_.size(); }
  bool is(std::size_t i, const char* w) const {
    return i < units_.size() && units_[i].kind == Unit::Word && units_[i].text == w;
  }
  bool word(std::size_t i) const { return i < units_.size() && units_[i].kind == Unit::Word; }
  bool content(std::size_t i) const { return word(i) && !lex_.is_closed(units_[i].text); }
  bool prep(std::size_t i) const { return i < units_.size() && units_[i].kind == Unit::Prep; }
  void mark(std::size_t i, const char* role) {
    for (std::size_t k = 0; k < units_[i].count; ++k) role_[units_[i].first + k] = role;
  }
  bool words(std::size_t& i, std::initializer_list<const char*> ws) {
    std::size_t j = i;
    for (auto w : ws) {
      if (!is(j, w)) return false;
      ++j;
    }
    for (std::size_t k = i; k < j; ++k) mark(k, "function");
    i = j;
    return true;
  }

  std::size_t np(std::size_t i, bool allow_pp, NounPhrase& out, bool allow_gesture = true) {
    NounPhrase n;
    if (allow_gesture && (is(i, "this") || is(i, "that"))) {
      n.gestural = true;
      mark(i++, "gesture");
    } else if (word(i) && is_determiner(units_[i].text)) {
      n.determiner = units_[i].text;
      mark(i++, "det");
    }
    std::vector<std::size_t> cw;
    while (content(i)) cw.push_back(i++);
    if (word(i) && is_generic_head(units_[i].text)) {
      n.generic_head = units_[i].text;
      mark(i++, "generic");
    }
    for (std::size_t k = 0; k < cw.size(); ++k) {
      bool last = k + 1 == cw.size() && !n.generic_head;
      mark(cw[k], last ? "head" : "attr");
      if (last) n.head = units_[cw[k]].text;
      else n.attributes.push_back(units_[cw[k]].text);
    }
    if (!n.gestural && !n.head && n.attributes.empty() && !n.generic_head) return npos;
    if (allow_pp && prep(i)) {
      NounPhrase obj;
      auto saved = role_;
      mark(i, "prep");
      std::size_t j = np(i + 1, true, obj);
      if (j != npos) {
        n.pp.push_back({units_[i].text, obj});
        i = j;
      } else {
        role_ = saved;
      }
    }
    out = n;
    return i;
  }

  // PREP NP
  std::size_t pp(std::size_t i, bool allow_nested, PrepPhrase& out) {
    if (!prep(i)) return npos;
    mark(i, "prep");
    NounPhrase n;
    std::size_t j = np(i + 1, allow_nested, n);
    if (j == npos) return npos;
    out = {units_[i].text, n};
    return j;
  }

  bool never_mind(ParseResult& r) {
    std::size_t i = 0;
    if (!words(i, {"never", "mind"}) || !end(i)) return false;
    r.category = Category::NeverMind;
    return true;
  }

  bool yes_no(ParseResult& r) {
    if (units_.size() != 1 || !(is(0, "yes") || is(0, "no"))) return false;
    mark(0, "answer");
    r.category = Category::YesNo;
    r.yes = is(0, "yes");
    return true;
  }

  bool next_task(ParseResult& r) {
    std::size_t i = 0;
    if (!((words(i, {"ok"}) || words(i, {"okay"}) || words(i, {"done"}) || words(i, {"that", "is", "all"})) &&
          end(i)))
      return false;
    r.category = Category::GetNextTask;
    return true;
  }

  bool property_answer(ParseResult& r) {
    std::size_t i = 0;
    words(i, {"it", "is"}) || words(i, {"that", "is"});
    words(i, {"a"}) || words(i, {"an"});
    if (!word(i) || !is_property_word(units_[i].text) || !end(i + 1)) return false;
    mark(i, "property");
    r.category = Category::PropertyAnswer;
    r.property_word = units_[i].text;
    return true;
  }

  bool attribute_query(ParseResult& r) {
    std::size_t i = 0;
    if (!words(i, {"what"}) || !word(i) || !is_property_word(units_[i].text)) return false;
    r.property_word = units_[i].text;
    mark(i++, "property");
    if (!words(i, {"is"})) return false;
    NounPhrase n;
    i = np(i, true, n);
    if (i == npos || !end(i)) return false;
    r.category = Category::AttributeQuery;
    r.subject = n;
    return true;
  }

  bool wh_spatial(ParseResult& r) {
    std::size_t i = 0;
    if (!(words(i, {"what"}) || words(i, {"which"}))) return false;
    if (word(i) && is_generic_head(units_[i].text)) mark(i++, "generic");
    if (!words(i, {"is"})) return false;
    PrepPhrase p;
    i = pp(i, true, p);
    if (i == npos || !end(i)) return false;
    r.category = Category::SpatialQuery;
    r.wh = true;
    r.pps = {p};
    return true;
  }

  bool spatial_yn(ParseResult& r) {
    std::size_t i = 0;
    if (!words(i, {"is"})) return false;
    NounPhrase s;
    i = np(i, false, s);
    if (i == npos) return false;
    PrepPhrase p;
    i = pp(i, true, p);
    if (i == npos || !end(i)) return false;
    r.category = Category::SpatialQuery;
    r.subject = s;
    r.pps = {p};
    return true;
  }

  bool goal(ParseResult& r) {
    std::size_t i = 0;
    if (!words(i, {"the", "goal", "is"})) return false;
    words(i, {"that"});
    NounPhrase s;
    i = np(i, false, s, false);
    if (i == npos || !words(i, {"is"})) return false;
    PrepPhrase p;
    i = pp(i, true, p);
    if (i == npos || !end(i)) return false;
    r.category = Category::GoalDescription;
    r.subject = s;
    r.pps = {p};
    return true;
  }

  bool which_answer(ParseResult& r) {
    NounPhrase n;
    std::size_t i = np(0, true, n);
    if (i == npos || !end(i)) return false;
    bool bare_gesture = n.gestural && !n.head && n.attributes.empty();
    if (!(bare_gesture || (n.generic_head && *n.generic_head == "one"))) return false;
    r.category = Category::WhichAnswer;
    r.subject = n;
    return true;
  }

  bool this_is(ParseResult& r) {
    std::size_t i = 0;
    if (!(is(0, "this") || is(0, "that")) || !is(1, "is")) return false;
    mark(0, "gesture");
    mark(1, "function");
    i = 2;
    NounPhrase pred;
    i = np(i, false, pred, false);
    if (i == npos || !end(i) || !pred.generic_head.value_or("").empty()) return false;
    NounPhrase subj;
    subj.gestural = true;
    r.category = Category::DescriptiveSentence;
    r.subject = subj;
    r.predicate = pred;
    return true;
  }

  bool descriptive(ParseResult& r) {
    NounPhrase s;
    std::size_t i = np(0, false, s);
    if (i == npos || !words(i, {"is"})) return false;
    PrepPhrase p;
    auto saved = role_;
    std::size_t j = pp(i, true, p);
    if (j != npos && end(j)) {
      r.category = Category::DescriptiveSentence;
      r.subject = s;
      r.pps = {p};
      return true;
    }
    role_ = saved;
    NounPhrase pred;
    j = np(i, false, pred, false);
    if (j == npos || !end(j)) return false;
    r.category = Category::DescriptiveSentence;
    r.subject = s;
    r.predicate = pred;
    return true;
  }

  bool command(ParseResult& r) {
    if (units_.empty()) return false;
    const Unit& v = units_[0];
    bool known_verb = lex_.pos(v.text) == PartOfSpeech::Verb;
    if (v.kind == Unit::Prep) return false;
    if (v.kind == Unit::Word) {
      if (lex_.is_closed(v.text)) return false;
      if (!known_verb && (units_.size() == 1 || lex_.pos(v.text).has_value())) return false;
    }
    mark(0, "verb");
    r.verb = v.text;
    std::size_t i = 1;
    bool attach_np = v.text == "pick up" || v.text == "point to" || v.text == "put down";
    if (!end(i) && !prep(i)) {
      NounPhrase d;
      i = np(i, attach_np, d);
      if (i == npos) return false;
      r.direct_object = d;
    }
    std::vector<PrepPhrase> pps;
    while (!end(i)) {
      PrepPhrase p;
      i = pp(i, false, p);
      if (i == npos) return false;
      pps.push_back(p);
    }
    // with several phrases the first modifies the object, the rest chain
    if (pps.size() >= 2 && r.direct_object) {
      r.direct_object->pp.push_back(pps[0]);
      pps.erase(pps.begin());
    }
    while (pps.size() >= 2) {
      pps[pps.size() - 2].object.pp.push_back(pps.back());
      pps.pop_back();
    }
    r.category = Category::VerbCommand;
    r.pps = pps;
    return true;
  }

  bool fragment(ParseResult& r) {
    NounPhrase n;
    std::size_t i = np(0, true, n);
    if (i == npos || !end(i)) return false;
    r.category = Category::NPFragment;
    r.subject = n;
    return true;
  }

  void finish(ParseResult& r) {
    for (std::size_t i = 0; i < toks_.size(); ++i) {
      TokenRole t{toks_[i], role_[i].empty() ? "unparsed" : role_[i], true};
      if (t.role == "attr" || t.role == "head" || t.role == "verb" || t.role == "unparsed") {
        // multi-token verbs and prepositions are static knowledge
        bool in_unit = false;
        for (auto& u : units_)
          if (u.first <= i && i < u.first + u.count && u.count > 1) in_unit = true;
        t.known = in_unit || lex_.is_closed(t.token) || lex_.pos(t.token).has_value();
        if (!t.known) r.unknown_words.push_back(t.token);
      }
      r.tokens.push_back(t);
    }
  }

  const std::vector<std::string>& toks_;
  const Lexicon& lex_;
  std::vector<Unit> units_;
  std::vector<std::string> role_;
};

}  // namespace

ParseResult parse(const std::string& text, const Lexicon& lex) {
  auto toks = tokenize(text);
  return Parser(toks, lex).run(text);
}

// ---- json ----

nlohmann::json np_to_json(const NounPhrase& np) {
  nlohmann::json j = {{"attributes", np.attributes}, {"gestural", np.gestural}};
  j["determiner"] = np.determiner ? nlohmann::json(*np.determiner) : nlohmann::json(nullptr);
  j["head"] = np.head ? nlohmann::json(*np.head) : nlohmann::json(nullptr);
  j["generic_head"] = np.generic_head ? nlohmann::json(*np.generic_head) : nlohmann::json(nullptr);
  j["pp"] = nlohmann::json::array();
  for (auto& p : np.pp) j["pp"].push_back({{"prep", p.prep}, {"object", np_to_json(p.object)}});
  return j;
}

namespace {
std::optional<std::string> opt_str(const nlohmann::json& j, const char* k) {
  if (!j.contains(k) || j.at(k).is_null()) return std::nullopt;
  return j.at(k).get<std::string>();
}
}  // namespace

NounPhrase np_from_json(const nlohmann::json& j) {
  NounPhrase n;
  n.attributes = j.at("attributes").get<std::vector<std::string>>();
  n.gestural = j.at("gestural").get<bool>();
  n.determiner = opt_str(j, "determiner");
  n.head = opt_str(j, "head");
  n.generic_head = opt_str(j, "generic_head");
  for (auto& p : j.at("pp")) n.pp.push_back({p.at("prep").get<std::string>(), np_from_json(p.at("object"))});
  return n;
}

nlohmann::json parse_to_json(const ParseResult& p) {
  auto opt_np = [](const std::optional<NounPhrase>& n) { return n ? np_to_json(*n) : nlohmann::json(nullptr); };
  nlohmann::json pps = nlohmann::json::array();
  for (auto& pp : p.pps) pps.push_back({{"prep", pp.prep}, {"object", np_to_json(pp.object)}});
  nlohmann::json toks = nlohmann::json::array();
  for (auto& t : p.tokens) toks.push_back({{"token", t.token}, {"role", t.role}, {"known", t.known}});
  return {{"category", category_name(p.category)},
          {"text", p.text},
          {"verb", p.verb ? nlohmann::json(*p.verb) : nlohmann::json(nullptr)},
          {"subject", opt_np(p.subject)},
          {"direct_object", opt_np(p.direct_object)},
          {"pps", pps},
          {"predicate", opt_np(p.predicate)},
          {"property_word", p.property_word ? nlohmann::json(*p.property_word) : nlohmann::json(nullptr)},
          {"yes", p.yes ? nlohmann::json(*p.yes) : nlohmann::json(nullptr)},
          {"wh", p.wh},
          {"unknown_words", p.unknown_words},
          {"tokens", toks}};
}

ParseResult parse_from_json(const nlohmann::json& j) {
  ParseResult p;
  auto cat = j.at("category").get<std::string>();
  bool found = false;
  for (int c = 0; c <= static_cast<int>(Category::Unparseable); ++c)
    if (cat == category_name(static_cast<Category>(c))) {
      p.category = static_cast<Category>(c);
      found = true;
    }
  if (!found) throw FormatError("bad category " + cat);
  p.text = j.at("text").get<std::string>();
  p.verb = opt_str(j, "verb");
  auto opt_np = [&](const char* k) -> std::optional<NounPhrase> {
    if (j.at(k).is_null()) return std::nullopt;
    return np_from_json(j.at(k));
  };
  p.subject = opt_np("subject");
  p.direct_object = opt_np("direct_object");
  p.predicate = opt_np("predicate");
  for (auto& pp : j.at("pps")) p.pps.push_back({pp.at("prep").get<std::string>(), np_from_json(pp.at("object"))});
  p.property_word = opt_str(j, "property_word");
  if (!j.at("yes").is_null()) p.yes = j.at("yes").get<bool>();
  p.wh = j.at("wh").get<bool>();
  p.unknown_words = j.at("unknown_words").get<std::vector<std::string>>();
  for (auto& t : j.at("tokens"))
    p.tokens.push_back({t.at("token").get<std::string>(), t.at("role").get<std::string>(), t.at("known").get<bool>()});
  return p;
}

}  // namespace grounded::language
