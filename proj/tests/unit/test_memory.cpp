#include <algorithm>
#include <random>
#include <stdexcept>

#include "doctest.h"
#include "grounded/error.hpp"
#include "grounded/memory/episodic_memory.hpp"
#include "grounded/memory/semantic_memory.hpp"

using namespace grounded;
using namespace grounded::memory;
using perception::PropertyKind;

namespace {

WordMap wm(const std::string& w, const std::string& sym, PropertyKind p) { return {w, {sym, p}, p}; }

ActionConceptNetwork move_net(std::optional<std::string> prep) {
  ActionConceptNetwork n;
  n.map_id = "M1";
  n.lexical_id = "L1";
  n.operator_node_id = "P1";
  n.verb = "move";
  n.has_direct_object = true;
  n.prep = prep;
  n.operator_id = "op_1";
  n.slots = {{"A11", "direct-object", "argument1"}, {"A12", "pp-object", "argument2"}};
  n.goal = GoalPattern{"G2", "P2", true, "", "A11", {GoalRef::Kind::Slot, "A12"}};
  return n;
}

ActionConceptNetwork store_net() {
  ActionConceptNetwork n;
  n.map_id = "M2";
  n.lexical_id = "L2";
  n.operator_node_id = "P3";
  n.verb = "store";
  n.has_direct_object = true;
  n.operator_id = "op_2";
  n.slots = {{"A21", "direct-object", "argument1"}};
  n.goal = GoalPattern{"G4", "P4", false, "in", "A21", {GoalRef::Kind::Location, "pantry"}};
  return n;
}

}  // namespace

TEST_CASE("word maps retrieve by word and by symbol") {
  SemanticMemory m;
  m.store(wm("red", "c1", PropertyKind::Color));
  auto r = m.retrieve(WordCue{.word = "red"});
  REQUIRE(r);
  CHECK(r->symbol.id == "c1");
  auto back = m.retrieve(WordCue{.symbol_id = "c1"});
  REQUIRE(back);
  CHECK(back->word == "red");
  CHECK_FALSE(m.retrieve(WordCue{.word = "blarg"}));
  CHECK_FALSE(SemanticMemory{}.retrieve(WordCue{.word = "blarg"}));
}

TEST_CASE("empty cue is rejected") {
  SemanticMemory m;
  CHECK_THROWS_AS(m.retrieve(WordCue{}), std::invalid_argument);
  CHECK_THROWS_AS(m.peek(PrepCue{}), std::invalid_argument);
  CHECK_THROWS_AS(m.peek(NetworkCue{}), std::invalid_argument);
}

TEST_CASE("conflicting word/property pair") {
  SemanticMemory m;
  m.store(wm("red", "c1", PropertyKind::Color));
  CHECK_THROWS_AS(m.store(wm("red", "c2", PropertyKind::Color)), DuplicateKey);
  CHECK_NOTHROW(m.store(wm("red", "c1", PropertyKind::Color)));
  CHECK_NOTHROW(m.store(wm("red", "h1", PropertyKind::Shape)));
  CHECK(m.word_maps().size() == 2);
  CHECK_THROWS_AS(m.store(WordMap{"x", {"c9", PropertyKind::Color}, PropertyKind::Size}), PropertyMismatch);
}

TEST_CASE("equal use: most recent wins") {
  SemanticMemory m;
  m.store(wm("red", "c1", PropertyKind::Color));
  m.store(wm("blue", "c2", PropertyKind::Color));
  CHECK(m.peek(WordCue{.property = PropertyKind::Color})->word == "blue");
}

TEST_CASE("frequency dominates recency") {
  SemanticMemory m;
  m.store(wm("red", "c1", PropertyKind::Color));
  m.store(wm("blue", "c2", PropertyKind::Color));
  m.retrieve(WordCue{.word = "blue"});
  m.retrieve(WordCue{.word = "blue"});
  m.retrieve(WordCue{.word = "red"});
  CHECK(m.peek(WordCue{.property = PropertyKind::Color})->word == "blue");
  // peek does not reinforce
  auto before = m;
  m.peek(WordCue{.word = "red"});
  CHECK(m == before);
}

TEST_CASE("retrieval ordering matches a lexicographic oracle") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 50; ++trial) {
    SemanticMemory m;
    std::vector<std::string> words;
    for (int i = 0; i < 6; ++i) {
      words.push_back("w" + std::to_string(i));
      m.store(wm(words.back(), "c" + std::to_string(i + 1), PropertyKind::Color));
    }
    // oracle state: (frequency, last-touch time)
    std::vector<std::pair<int, int>> use(6);
    int t = 0;
    for (int i = 0; i < 6; ++i) use[i] = {0, ++t};
    for (int step = 0; step < 30; ++step) {
      int i = std::uniform_int_distribution<int>(0, 5)(rng);
      m.retrieve(WordCue{.word = words[i]});
      ++use[i].first;
      use[i].second = ++t;
      int best = static_cast<int>(std::max_element(use.begin(), use.end()) - use.begin());
      auto got = m.peek(WordCue{.property = PropertyKind::Color});
      REQUIRE(got);
      CHECK(got->word == words[best]);
    }
  }
}

TEST_CASE("retrieval soundness and completeness") {
  std::mt19937_64 rng(11);
  SemanticMemory m;
  const char* words[] = {"red", "blue", "big", "square", "round"};
  int n = 0;
  for (auto w : words)
    for (auto p : perception::kProperties)
      if (std::uniform_int_distribution<int>(0, 1)(rng))
        m.store(WordMap{w, {perception::symbol_prefix(p) + std::to_string(++n), p}, p});
  for (auto w : words)
    for (auto p : perception::kProperties) {
      WordCue cue{.word = w, .property = p};
      auto got = m.peek(cue);
      bool any = std::any_of(m.word_maps().begin(), m.word_maps().end(),
                             [&](const WordMap& e) { return e.word == w && e.property == p; });
      CHECK(bool(got) == any);
      if (got) {
        CHECK(got->word == w);
        CHECK(got->property == p);
      }
    }
}

TEST_CASE("prep maps: one composition per word") {
  SemanticMemory m;
  spatial::SpatialComposition a, b;
  a.example_count = 1;
  b.example_count = 2;
  m.store(PrepMap{"left of", a});
  m.store(PrepMap{"left of", b});
  CHECK(m.prep_maps().size() == 1);
  CHECK(m.retrieve(PrepCue{"left of"})->composition.example_count == 2);
  CHECK_FALSE(m.retrieve(PrepCue{"near"}));
}

TEST_CASE("network signature match") {
  SemanticMemory m;
  m.store(move_net("in"));
  auto right = move_net("right of");
  right.map_id = "M3";
  m.store(right);
  m.store(store_net());
  CHECK(m.networks().size() == 3);
  auto got = m.retrieve(NetworkCue{.verb = "move", .prep = std::optional<std::string>("right of")});
  REQUIRE(got);
  CHECK(got->map_id == "M3");
  CHECK(m.peek(NetworkCue{.verb = "move", .prep = std::optional<std::string>("in")})->map_id == "M1");
  CHECK_FALSE(m.peek(NetworkCue{.verb = "move", .prep = std::optional<std::string>()}));
  CHECK(m.peek(NetworkCue{.verb = "store", .prep = std::optional<std::string>()})->operator_id == "op_2");
  CHECK(m.peek(NetworkCue{.operator_id = "op_2"})->verb == "store");
}

TEST_CASE("network goal must reference declared slots") {
  auto n = move_net("in");
  CHECK(n.valid());
  n.goal->reference.value = "A99";
  CHECK_FALSE(n.valid());
  SemanticMemory m;
  CHECK_THROWS_AS(m.store(n), std::invalid_argument);
}

TEST_CASE("semantic memory json identity") {
  SemanticMemory m;
  m.store(wm("red", "c1", PropertyKind::Color));
  m.store(wm("large", "s1", PropertyKind::Size));
  auto comp = spatial::learn_example(std::nullopt, spatial::extract_primitives({{0.2, 0.5, 0.05}, {0.1, 0.1, 0.1}},
                                                                                {{0.6, 0.5, 0.05}, {0.1, 0.1, 0.1}}));
  m.store(PrepMap{"left of", comp});
  m.store(move_net("right of"));
  m.store(store_net());
  m.retrieve(WordCue{.word = "red"});
  auto j = semantic_to_json(m);
  auto back = semantic_from_json(nlohmann::json::parse(j.dump()));
  CHECK(back == m);
  CHECK(semantic_to_json(back) == j);
}

namespace {

EpisodeSnapshot snap(int tick) {
  EpisodeSnapshot s;
  s.objects.push_back({{1}, {0.2, 0.3, 0.06}, {0.12, 0.12, 0.12}, {"c1", std::nullopt, "h2"}});
  s.objects.push_back({{2}, {0.5, 0.3, 0.03}, {0.06, 0.06, 0.06}, {}});
  if (tick % 2) s.holding = world::ObjectId{1};
  s.top_segment = tick % 3 ? "A1" : "G12";
  s.top_purpose = tick % 3 ? "learn-verb" : "acquire-goal";
  if (tick % 4 == 1) s.action = world::PickUp{{1}};
  if (tick % 4 == 3) s.action = world::PutDown{0.4, 0.9};
  if (tick % 5 == 0) s.instructor_utterance = "store the orange triangle";
  s.agent_utterance = "Ok.";
  s.world_tick = tick;
  return s;
}

}  // namespace

TEST_CASE("episodic record/get/span") {
  EpisodicMemory e;
  CHECK(e.next_index() == 1);
  for (int i = 0; i < 10; ++i) CHECK(e.record(snap(i)) == std::uint64_t(i + 1));
  CHECK(e.get(4).snapshot == snap(3));
  CHECK(e.span(3, 7).size() == 5);
  CHECK(e.span(5, 5).size() == 1);
  auto s = e.span(2, 9);
  for (std::size_t i = 1; i < s.size(); ++i) CHECK(s[i].index == s[i - 1].index + 1);
  CHECK_THROWS_AS(e.get(0), IndexOutOfRange);
  CHECK_THROWS_AS(e.get(11), IndexOutOfRange);
  CHECK_THROWS_AS(e.span(3, 12), IndexOutOfRange);
  CHECK_THROWS_AS(e.span(6, 5), IndexOutOfRange);
  CHECK(e.most_recent_with_purpose("acquire-goal") == std::uint64_t(10));
  CHECK(e.most_recent_with_purpose("learn-verb") == std::uint64_t(9));
  CHECK_FALSE(e.most_recent_with_purpose("learn-prep"));
  CHECK(e.get(1).snapshot.find({2}) != nullptr);
  CHECK(e.get(1).snapshot.find({7}) == nullptr);
}

TEST_CASE("episodic json identity") {
  EpisodicMemory e;
  for (int i = 0; i < 12; ++i) e.record(snap(i));
  auto back = episodic_from_json(nlohmann::json::parse(episodic_to_json(e).dump()));
  CHECK(back == e);
  auto bad = episodic_to_json(e);
  bad[3]["index"] = 40;
  CHECK_THROWS_AS(episodic_from_json(bad), FormatError);
}
