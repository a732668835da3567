#include "grounded/harness/scenario.hpp"

#include <algorithm>
#include <fstream>

#include "grounded/agent/agent.hpp"
#include "grounded/error.hpp"

namespace grounded::harness {

using nlohmann::json;

namespace {

template <class T>
std::optional<T> opt(const json& j, const char* key) {
  if (!j.contains(key)) return std::nullopt;
  return j.at(key).get<T>();
}

bool in_region(const world::Scene& sc, world::ObjectId id, const std::string& loc) {
  auto* o = sc.find(id);
  auto* l = sc.location(loc);
  if (!o || !l || sc.arm.holding == id) return false;
  return o->pose.x > l->region.x0 && o->pose.x < l->region.x1 && o->pose.y > l->region.y0 &&
         o->pose.y < l->region.y1;
}

std::string joined(const std::vector<std::string>& v) {
  std::string s = "[";
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ", \"" : "\"") + v[i] + "\"";
  return s + "]";
}

bool has_prefix(const std::vector<std::string>& v, const std::string& p) {
  return std::any_of(v.begin(), v.end(), [&](auto& x) { return x.rfind(p, 0) == 0; });
}

}  // namespace

Scenario scenario_from_json(const json& j) {
  if (!j.is_object()) throw FormatError("scenario must be an object");
  Scenario s;
  s.version = j.value("version", 1);
  if (s.version != 1) throw FormatError("unsupported scenario version");
  s.name = j.value("name", "");
  if (j.contains("scene")) s.scene = world::scene_spec_from_json(j["scene"]);
  s.seed = j.value("seed", s.scene.seed ? s.scene.seed : std::uint64_t{1});
  for (auto& sj : j.value("steps", json::array())) {
    ScenarioStep st;
    st.say = sj.at("say").get<std::string>();
    if (sj.contains("click")) {
      auto id = world::parse_object_id(sj["click"].get<std::string>());
      if (!id) throw FormatError("bad click target in scenario");
      st.click = *id;
    }
    if (sj.contains("expect")) {
      auto& e = sj["expect"];
      st.expect.said = opt<std::vector<std::string>>(e, "said");
      st.expect.last = opt<std::string>(e, "last");
      st.expect.stack = opt<std::vector<std::string>>(e, "stack");
      st.expect.learned = e.value("learned", std::vector<std::string>{});
      st.expect.actions = opt<int>(e, "actions");
      st.expect.word_segments = opt<int>(e, "word_segments");
    }
    s.steps.push_back(std::move(st));
  }
  if (j.contains("final")) {
    auto& f = j["final"];
    s.stack = opt<std::vector<std::string>>(f, "stack");
    for (auto& r : f.value("in_region", json::array())) {
      auto id = world::parse_object_id(r.at("object").get<std::string>());
      if (!id) throw FormatError("bad object in scenario in_region");
      s.in_region.push_back({*id, r.at("location").get<std::string>()});
    }
    s.rules = opt<int>(f, "rules");
    s.learned = f.value("learned", std::vector<std::string>{});
  }
  return s;
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot read " + path);
  try {
    return scenario_from_json(json::parse(in));
  } catch (const json::exception& e) {
    throw FormatError(path + ": " + e.what());
  }
}

json run_scenario(const Scenario& s) {
  json transcript = json::array();
  if (s.steps.empty()) return transcript;

  auto gen = world::generate_scene(s.scene, s.seed);
  agent::SimulatedEnvironment env(gen.scene, {}, s.seed);
  agent::AgentConfig cfg;
  cfg.seed = s.seed;
  agent::Agent a(env, cfg);
  std::vector<std::string> all_learned;

  for (std::size_t i = 0; i < s.steps.size(); ++i) {
    auto& st = s.steps[i];
    if (st.click) a.select(*st.click);
    auto r = a.hear(st.say);

    std::vector<std::string> learned;
    for (auto& l : r.learned) learned.push_back(std::string(dialog::learning_kind_name(l.kind)) + " " + l.detail);
    all_learned.insert(all_learned.end(), learned.begin(), learned.end());
    int words = static_cast<int>(std::count_if(r.opened.begin(), r.opened.end(), [](dialog::Purpose p) {
      return p == dialog::Purpose::LearnWordProperty || p == dialog::Purpose::TeachWordExamples;
    }));
    json entry = {{"step", i + 1},
                  {"instructor", st.say},
                  {"click", st.click ? json(st.click->str()) : json(nullptr)},
                  {"agent", r.said()},
                  {"actions", json::array()},
                  {"learned", learned},
                  {"stack", a.stack().ids()},
                  {"word_segments", words}};
    for (auto& act : r.actions()) entry["actions"].push_back(world::describe(act));
    transcript.push_back(entry);

    auto fail = [&](const std::string& what, const std::string& want, const std::string& got) {
      throw AssertionFailure("step " + std::to_string(i + 1) + " (\"" + st.say + "\"): " + what + ": expected " +
                             want + ", got " + got);
    };
    auto& e = st.expect;
    auto said = r.said();
    if (e.said && *e.said != said) fail("agent utterances", joined(*e.said), joined(said));
    if (e.last && (said.empty() || said.back() != *e.last))
      fail("last utterance", "\"" + *e.last + "\"", said.empty() ? "nothing" : "\"" + said.back() + "\"");
    if (e.stack && *e.stack != a.stack().ids()) fail("stack", joined(*e.stack), joined(a.stack().ids()));
    for (auto& p : e.learned)
      if (!has_prefix(learned, p)) fail("learning event", "\"" + p + "\"", joined(learned));
    if (e.actions && *e.actions != static_cast<int>(r.actions().size()))
      fail("action count", std::to_string(*e.actions), std::to_string(r.actions().size()));
    if (e.word_segments && *e.word_segments != words)
      fail("agent-initiated word segments", std::to_string(*e.word_segments), std::to_string(words));
  }

  auto final_fail = [](const std::string& what, const std::string& want, const std::string& got) {
    throw AssertionFailure("final state: " + what + ": expected " + want + ", got " + got);
  };
  if (s.stack && *s.stack != a.stack().ids()) final_fail("stack", joined(*s.stack), joined(a.stack().ids()));
  for (auto& r : s.in_region)
    if (!in_region(env.scene(), r.object, r.location))
      final_fail(r.object.str() + " location", "in the " + r.location, "elsewhere");
  if (s.rules && *s.rules != static_cast<int>(a.rules().size()))
    final_fail("rule count", std::to_string(*s.rules), std::to_string(a.rules().size()));
  for (auto& p : s.learned)
    if (!has_prefix(all_learned, p)) final_fail("learning event", "\"" + p + "\"", joined(all_learned));
  return transcript;
}

}  // namespace grounded::harness
