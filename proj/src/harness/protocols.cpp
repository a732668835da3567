#include "grounded/harness/protocols.hpp"

#include <algorithm>
#include <chrono>
#include <numeric>
#include <ostream>
#include <set>

#include "grounded/error.hpp"
#include "grounded/language/templates.hpp"

namespace grounded::harness {

using agent::Agent;
using agent::SimulatedEnvironment;
using perception::PropertyKind;
using world::ObjectId;

namespace {

std::ostream* g_trace = nullptr;

std::uint64_t derive(std::uint64_t seed, std::uint64_t k) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (k + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

template <class T>
void shuffle(std::vector<T>& v, std::mt19937_64& rng) {
  // Fisher-Yates with our own index draws so the order is stable across standard libraries
  for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[rng() % i]);
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

agent::AgentConfig agent_config(const HarnessConfig& cfg, std::uint64_t seed) {
  auto a = cfg.agent;
  a.seed = seed;
  return a;
}

void place(world::Scene& s, ObjectId id, double x, double y) {
  auto& o = *s.find(id);
  o.pose = {x, y, o.bbox.z / 2};
}

bool answered_word(const Exchange& ex, const std::string& word) {
  return ex.last_template == language::TemplateId::AnswerWord && ex.last_said == word;
}

std::optional<bool> answered_yes_no(const Exchange& ex) {
  if (ex.last_template == language::TemplateId::AnswerYes) return true;
  if (ex.last_template == language::TemplateId::AnswerNo) return false;
  return std::nullopt;
}

// ---- nouns ----

RunReport nouns_run(PropertyKind prop, const HarnessConfig& cfg, std::uint64_t seed, Latency& lat) {
  auto& nc = cfg.nouns;
  world::SceneSpec spec;
  spec.objects.resize(nc.objects);
  spec.shape_variation = nc.shape_variation;
  spec.shape_separation = nc.shape_separation;
  auto gen = world::generate_scene(spec, derive(seed, 0));
  auto noise = nc.noise;
  noise.shape = nc.shape_noise;
  SimulatedEnvironment env(gen.scene, noise, derive(seed, 1));
  Agent a(env, agent_config(cfg, derive(seed, 2)));
  ScriptedInstructor ins(spec.palette, gen.truth, 0, derive(seed, 3));
  std::mt19937_64 rng(derive(seed, 4));

  RunReport rep;
  rep.seed = seed;
  std::string group = perception::property_name(prop);
  std::vector<ObjectId> ids;
  for (auto& [id, t] : gen.truth) {
    ids.push_back(id);
    rep.concepts[ins.word_for(id, prop)].group = group;
  }
  std::string question = "What " + group + " is this?";

  int perfect_run = 0;
  for (int trial = 1; trial <= cfg.trial_cap && perfect_run < 2; ++trial) {
    rep.trials = trial;
    shuffle(ids, rng);
    bool perfect = true;
    for (auto id : ids) {
      auto word = ins.word_for(id, prop);
      auto& c = rep.concepts[word];
      auto ex = converse(a, env, ins, question, id, cfg.turn_cap, &lat);
      if (answered_word(ex, word)) {
        ++c.passed;
        continue;
      }
      ++c.failed;
      perfect = false;
      ++c.examples;
      converse(a, env, ins, ins.teaching_sentence(word), id, cfg.turn_cap, &lat);
    }
    perfect_run = perfect ? perfect_run + 1 : 0;
  }
  rep.converged = perfect_run >= 2;
  rep.trials_by_group[group] = rep.trials;

  for (int pass = 0; pass < nc.eval_passes; ++pass) {
    shuffle(ids, rng);
    for (auto id : ids) {
      auto ex = converse(a, env, ins, question, id, cfg.turn_cap, &lat);
      ++rep.evaluated;
      if (answered_word(ex, ins.word_for(id, prop))) ++rep.correct;
    }
  }
  rep.metrics["accuracy_" + group] = rep.evaluated ? double(rep.correct) / rep.evaluated : 0;
  rep.metrics["converged_" + group] = rep.converged ? 1 : 0;
  return rep;
}

// ---- prepositions ----

Box block_at(double x, double y) { return {{x, y, kPrepBlock / 2}, {kPrepBlock, kPrepBlock, kPrepBlock}}; }

bool apart(const Box& p, const Box& r, Axis a) { return p.hi(a) < r.lo(a) || p.lo(a) > r.hi(a); }
double sep(const Box& p, const Box& r, Axis a) { return std::max(r.lo(a) - p.hi(a), p.lo(a) - r.hi(a)); }

// representative configurations: the main relation, with near and far
// measured along one axis while the other stays aligned
bool representative(const std::string& prep, const Box& p, const Box& r) {
  if (!prep_oracle(prep, p, r)) return false;
  if (prep == "near" || prep == "far from") return !apart(p, r, Axis::X) || !apart(p, r, Axis::Y);
  return true;
}

bool boundary_negative(const std::string& prep, const Box& p, const Box& r) {
  if (prep_oracle(prep, p, r)) return false;
  auto overlap_by = [](double a_hi, double b_lo) { return a_hi - b_lo; };
  if (prep == "left of") {
    double o = overlap_by(p.hi(Axis::X), r.lo(Axis::X));
    return o > 0.002 && o <= 0.03;
  }
  if (prep == "right of") {
    double o = overlap_by(r.hi(Axis::X), p.lo(Axis::X));
    return o > 0.002 && o <= 0.03;
  }
  if (prep == "in front of") {
    double o = overlap_by(p.hi(Axis::Y), r.lo(Axis::Y));
    return o > 0.002 && o <= 0.03;
  }
  if (prep == "behind") {
    double g = sep(p, r, Axis::X);
    return p.lo(Axis::Y) > r.hi(Axis::Y) + 0.002 && g > 0.002 && g <= 0.05;
  }
  bool one_axis = !apart(p, r, Axis::X) || !apart(p, r, Axis::Y);
  double g = std::max(std::max(sep(p, r, Axis::X), 0.0), std::max(sep(p, r, Axis::Y), 0.0));
  if (prep == "near") return one_axis && g >= 0.12 && g <= 0.2;
  if (prep == "far from") return one_axis && g >= 0.2 && g <= 0.33;
  return false;
}

// no razor-thin cases: every strict relation clears its boundary a little
bool unambiguous(const Box& p, const Box& r) {
  for (Axis a : {Axis::X, Axis::Y})
    if (std::abs(sep(p, r, a)) < 0.002) return false;
  return apart(p, r, Axis::X) || apart(p, r, Axis::Y);
}

Arrangement sample_arrangement(const std::string& prep, bool positive, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(kPrepBlock / 2, 1 - kPrepBlock / 2);
  for (int attempt = 0; attempt < 1000000; ++attempt) {
    Arrangement ar{prep, u(rng), u(rng), u(rng), u(rng), positive};
    auto p = block_at(ar.px, ar.py), r = block_at(ar.rx, ar.ry);
    if (!unambiguous(p, r)) continue;
    if (positive ? representative(prep, p, r) : boundary_negative(prep, p, r)) return ar;
  }
  throw PlacementInfeasible("no arrangement for " + prep);
}


struct PrepSession {
  SimulatedEnvironment env;
  Agent agent;
  ScriptedInstructor ins;

  PrepSession(const world::GeneratedScene& gen, const HarnessConfig& cfg, std::uint64_t seed)
      : env(gen.scene, {}, derive(seed, 1)),
        agent(env, agent_config(cfg, derive(seed, 2))),
        ins(world::default_palette(), gen.truth, 0, derive(seed, 3)) {
    ins.set_description(false, true, false);
  }

  void arrange(const Arrangement& ar) {
    place(env.scene_mut(), ObjectId{1}, ar.px, ar.py);
    place(env.scene_mut(), ObjectId{2}, ar.rx, ar.ry);
  }
  std::string statement(const std::string& prep) {
    return "The red object is " + prep + " the blue object.";
  }
};

RunReport prepositions_run(const HarnessConfig& cfg, std::uint64_t seed, Latency& lat) {
  auto& pc = cfg.prepositions;
  world::SceneSpec spec;
  spec.objects = {{"red", "small", "square", std::array<double, 2>{0.2, 0.2}},
                  {"blue", "small", "square", std::array<double, 2>{0.6, 0.6}}};
  spec.locations = std::vector<world::NamedLocation>{};
  auto gen = world::generate_scene(spec, derive(seed, 0));
  PrepSession s(gen, cfg, seed);
  std::mt19937_64 rng(derive(seed, 4));

  // the two color words are given up front; they are not what is measured
  for (int i = 1; i <= 2; ++i)
    converse(s.agent, s.env, s.ins, s.ins.teaching_sentence(s.ins.word_for(ObjectId{i}, PropertyKind::Color)),
             ObjectId{i}, cfg.turn_cap, &lat);

  RunReport rep;
  rep.seed = seed;
  int corrections = 0;
  bool all_converged = true;
  for (auto& prep : oracle_preps()) {
    auto& c = rep.concepts[prep];
    c.group = "preposition";
    auto set = arrangements(prep, pc.per_prep, pc.positive, rng);
    int perfect_run = 0, trials = 0;
    for (int trial = 1; trial <= cfg.trial_cap && perfect_run < 2; ++trial) {
      trials = trial;
      shuffle(set, rng);
      bool perfect = true;
      for (auto& ar : set) {
        s.arrange(ar);
        bool taught = false;
        // an unknown preposition: describe this arrangement, or a positive one
        ReplyHook hook = [&](const dialog::Utterance& q) -> std::optional<Reply> {
          if (q.tmpl != language::TemplateId::AskPrepExample) return std::nullopt;
          if (!ar.positive)
            for (auto& other : set)
              if (other.positive) {
                s.arrange(other);
                break;
              }
          taught = true;
          return Reply{s.statement(prep), {}};
        };
        auto ex = converse(s.agent, s.env, s.ins, "Is the red object " + prep + " the blue object?", std::nullopt,
                           cfg.turn_cap, &lat, hook);
        auto said = answered_yes_no(ex);
        if (!taught && said && *said == ar.positive) {
          ++c.passed;
          continue;
        }
        ++c.failed;
        perfect = false;
        if (taught) {
          ++c.examples;
        } else if (ar.positive) {
          ++c.examples;
          converse(s.agent, s.env, s.ins, s.statement(prep), std::nullopt, cfg.turn_cap, &lat);
        } else {
          // a false positive can only be corrected, there is nothing to learn from it
          ++corrections;
          converse(s.agent, s.env, s.ins, "No.", std::nullopt, cfg.turn_cap, &lat);
        }
      }
      perfect_run = perfect ? perfect_run + 1 : 0;
    }
    rep.trials_by_group[prep] = trials;
    rep.trials += trials;
    all_converged = all_converged && perfect_run >= 2;
  }
  rep.converged = all_converged;

  // a fresh set of arrangements, nothing taught
  std::vector<Arrangement> fresh;
  for (auto& prep : oracle_preps())
    for (auto& ar : arrangements(prep, pc.per_prep, pc.positive, rng)) fresh.push_back(ar);
  shuffle(fresh, rng);
  std::map<std::string, int> right;
  for (auto& ar : fresh) {
    s.arrange(ar);
    auto ex = converse(s.agent, s.env, s.ins, "Is the red object " + ar.prep + " the blue object?", std::nullopt,
                       cfg.turn_cap, &lat, [](const dialog::Utterance&) { return std::optional<Reply>(Reply{"never mind", {}}); });
    ++rep.evaluated;
    auto said = answered_yes_no(ex);
    if (said && *said == ar.positive) {
      ++rep.correct;
      ++right[ar.prep];
    }
  }
  for (auto& prep : oracle_preps())
    rep.metrics["accuracy " + prep] = double(right[prep]) / pc.per_prep;
  rep.metrics["corrections"] = corrections;
  return rep;
}

// ---- verbs ----

struct VerbWorld {
  world::Scene base;
  std::map<ObjectId, world::TruthLabels> truth;
  std::vector<ObjectId> targets, landmarks;
};

std::vector<world::NamedLocation> roomy_locations() {
  auto r = [](double x0, double x1) { return world::Rect{x0, 0.78, x1, 0.93}; };
  return {{"stove", r(0.10, 0.22)}, {"dishwasher", r(0.34, 0.46)}, {"garbage", r(0.58, 0.70)},
          {"pantry", r(0.82, 0.90)}};
}

VerbWorld verb_world(std::uint64_t seed) {
  world::SceneSpec spec;
  std::vector<std::string> colors{"red", "blue", "green", "yellow"};
  for (int i = 0; i < 4; ++i)
    spec.objects.push_back({colors[i], "small", "square", std::array<double, 2>{0.15 + 0.233 * i, 0.12}});
  for (int i = 0; i < 4; ++i)
    spec.objects.push_back({colors[i], "large", "square", std::array<double, 2>{0.2 + 0.2 * i, 0.45}});
  spec.locations = roomy_locations();
  auto gen = world::generate_scene(spec, seed);
  VerbWorld w{gen.scene, gen.truth, {}, {}};
  for (int i = 1; i <= 4; ++i) w.targets.push_back(ObjectId{i});
  for (int i = 5; i <= 8; ++i) w.landmarks.push_back(ObjectId{i});
  return w;
}

struct Template {
  std::string name, verb, relation;
};

const std::vector<Template>& verb_templates() {
  static const std::vector<Template> t{{"move in", "move", "in"},
                                       {"move left of", "move", "left of"},
                                       {"move right of", "move", "right of"},
                                       {"store", "store", "in"},
                                       {"discard", "discard", "in"}};
  return t;
}

std::vector<std::string> references(const Template& t, const VerbWorld& w) {
  if (t.verb == "store") return {"pantry"};
  if (t.verb == "discard") return {"garbage"};
  std::vector<std::string> out;
  if (t.relation != "in")
    for (auto id : w.landmarks) out.push_back(id.str());
  for (auto& l : w.base.locations) out.push_back(l.name);
  return out;
}

struct VerbSession {
  VerbWorld w;
  SimulatedEnvironment env;
  Agent agent;
  ScriptedInstructor ins;
  int turn_cap;
  Latency* lat;

  VerbSession(const HarnessConfig& cfg, std::uint64_t seed, Latency& l)
      : w(verb_world(derive(seed, 0))),
        env(w.base, {}, derive(seed, 1)),
        agent(env, agent_config(cfg, derive(seed, 2))),
        ins(world::default_palette(), w.truth, cfg.verbs.superfluous_rate, derive(seed, 3)),
        turn_cap(cfg.turn_cap),
        lat(&l) {
    ins.set_description(true, true, false);
    prime();
  }

  Exchange say(const std::string& text, std::optional<ObjectId> click = std::nullopt) {
    return converse(agent, env, ins, text, click, turn_cap, lat);
  }

  // colors, sizes and the three prepositions are known before verbs are taught
  void prime() {
    for (auto id : w.targets) say(ins.teaching_sentence(ins.word_for(id, PropertyKind::Color)), id);
    say("This is small.", w.targets[0]);
    say("This is large.", w.landmarks[0]);

    auto& sc = env.scene_mut();
    auto t = w.targets[0], l = w.landmarks[1];
    auto* pantry = sc.location("pantry");
    place(sc, t, (pantry->region.x0 + pantry->region.x1) / 2, (pantry->region.y0 + pantry->region.y1) / 2);
    say(cap(ins.describe(t)) + " is in the pantry.");
    double lx = sc.at(l).pose.x, ly = sc.at(l).pose.y;
    for (auto& [prep, sign] : {std::pair{"left of", -1.0}, std::pair{"right of", 1.0}}) {
      for (auto [g, dy] : {std::pair{0.03, 0.0}, std::pair{0.12, -0.15}, std::pair{0.3, 0.16}}) {
        place(sc, t, lx + sign * (0.06 + 0.03 + g), ly + dy);
        say(cap(ins.describe(t)) + " is " + prep + " " + ins.describe(l) + ".");
      }
    }
    sc = w.base;
  }

  static std::string cap(std::string s) {
    s[0] = static_cast<char>(std::toupper(s[0]));
    return s;
  }

  // one command from a fresh layout; returns (instructed, goal met)
  std::pair<bool, bool> run(const Template& t, ObjectId target, const std::string& ref, bool holding) {
    env.scene_mut() = w.base;
    if (holding) env.scene_mut() = world::apply_action(w.base, world::PickUp{target});
    auto task = ins.make_task(t.verb, target, t.relation, ref);
    ins.begin_task(task);
    auto ex = say(task.command);
    ins.end_task();
    return {ex.questions > 0, ins.goal_met(task, env.scene())};
  }
};

RunReport verbs_run(const HarnessConfig& cfg, std::uint64_t seed, Latency& lat) {
  VerbSession s(cfg, seed, lat);
  std::mt19937_64 rng(derive(seed, 4));
  RunReport rep;
  rep.seed = seed;
  auto draw = [&](const Template& t) {
    auto refs = references(t, s.w);
    auto target = s.w.targets[rng() % s.w.targets.size()];
    auto ref = refs[rng() % refs.size()];
    bool holding = rng() % 2;
    return std::tuple{target, ref, holding};
  };

  std::vector<Template> order = verb_templates();
  for (auto& t : order) rep.concepts[t.name].group = "template";
  int perfect_run = 0;
  for (int trial = 1; trial <= cfg.trial_cap && perfect_run < 2; ++trial) {
    rep.trials = trial;
    shuffle(order, rng);
    bool perfect = true;
    for (auto& t : order) {
      auto [target, ref, holding] = draw(t);
      auto [instructed, met] = s.run(t, target, ref, holding);
      auto& c = rep.concepts[t.name];
      if (!instructed && met) {
        ++c.passed;
        continue;
      }
      ++c.failed;
      perfect = false;
      if (instructed) ++c.examples;
    }
    perfect_run = perfect ? perfect_run + 1 : 0;
  }
  rep.converged = perfect_run >= 2;

  for (auto& t : verb_templates())
    for (int i = 0; i < cfg.verbs.test_instantiations; ++i) {
      auto [target, ref, holding] = draw(t);
      auto [instructed, met] = s.run(t, target, ref, holding);
      ++rep.evaluated;
      if (!instructed && met) ++rep.correct;
    }

  int pointing = 0;
  for (auto& r : s.agent.rules()) pointing += r.action.kind == agent::ActionKind::PointTo;
  rep.metrics["superfluous given"] = s.ins.superfluous_given();
  rep.metrics["superfluous in rules"] = pointing;

  // generality: a fresh agent taught only "move right of", then every instantiation
  VerbSession r(cfg, derive(seed, 5), lat);
  auto& right = verb_templates()[2];
  int examples = 0, passes = 0;
  for (int i = 0; i < cfg.trial_cap && passes < 2; ++i) {
    auto [target, ref, holding] = draw(right);
    auto [instructed, met] = r.run(right, target, ref, holding);
    examples += instructed;
    passes = !instructed && met ? passes + 1 : 0;
  }
  int ok = 0, total = 0;
  for (auto target : r.w.targets)
    for (auto& ref : references(right, r.w))
      for (bool holding : {false, true}) {
        auto [instructed, met] = r.run(right, target, ref, holding);
        ++total;
        ok += !instructed && met;
      }
  rep.metrics["right of examples"] = examples;
  rep.metrics["right of instantiations"] = total;
  rep.metrics["right of correct"] = ok;
  return rep;
}

// ---- combined ----

RunReport combined_run(const HarnessConfig& cfg, std::uint64_t seed, Latency& lat) {
  std::mt19937_64 rng(derive(seed, 4));
  std::vector<std::string> colors{"red", "blue", "green", "yellow"}, sizes{"small", "large"},
      shapes{"triangle", "square", "circle"};
  shuffle(colors, rng);
  shuffle(sizes, rng);
  shuffle(shapes, rng);
  world::SceneSpec spec;
  spec.locations = roomy_locations();
  // index i picks a distinct (color, size, shape) triple for i < 12
  for (int i = 0; i < cfg.combined.objects; ++i)
    spec.objects.push_back({colors[i % 4], sizes[i % 2], shapes[i % 3], std::nullopt});
  auto layout = [&](int k) { return world::generate_scene(spec, derive(seed, 100 + k)); };
  auto gen = layout(0);
  SimulatedEnvironment env(gen.scene, {}, derive(seed, 1));
  Agent a(env, agent_config(cfg, derive(seed, 2)));
  ScriptedInstructor ins(spec.palette, gen.truth, 0, derive(seed, 3));
  ins.set_description(true, true, true);

  std::vector<ObjectId> ids;
  for (auto& o : gen.scene.objects) ids.push_back(o.id);
  std::vector<Template> kinds = verb_templates();
  RunReport rep;
  rep.seed = seed;
  for (int k = 0; k < cfg.combined.commands; ++k) {
    env.scene_mut() = layout(k).scene;
    // commands whose goal cannot be reached on this layout are redrawn
    VerbTask task;
    for (int draw = 0;; ++draw) {
      auto& t = kinds[rng() % kinds.size()];
      auto target = ids[rng() % ids.size()];
      std::string ref;
      if (t.verb == "store") ref = "pantry";
      else if (t.verb == "discard") ref = "garbage";
      else {
        std::vector<std::string> refs;
        for (auto& l : env.scene().locations) refs.push_back(l.name);
        if (t.relation != "in")
          for (auto id : ids)
            if (id != target) refs.push_back(id.str());
        ref = refs[rng() % refs.size()];
      }
      task = ins.make_task(t.verb, target, t.relation, ref);
      if (ins.feasible(task, env.scene()) || draw >= 100) break;
    }
    ins.begin_task(task);
    auto ex = converse(a, env, ins, task.command, std::nullopt, cfg.turn_cap, &lat);
    ins.end_task();
    rep.commands.push_back({task.command, ex.questions, ex.instructor_utterances, ins.goal_met(task, env.scene())});
  }
  rep.trials = cfg.combined.commands;
  int n = static_cast<int>(rep.commands.size());
  int tail_ones = 0;
  for (int k = std::max(0, n - 3); k < n; ++k) tail_ones += rep.commands[k].instructor_utterances == 1;
  rep.converged = n >= 3 && tail_ones == 3;
  rep.metrics["first command interactions"] = n ? rep.commands[0].agent_initiated : 0;
  rep.metrics["last three at one utterance"] = tail_ones == 3;
  int met = 0;
  for (auto& c : rep.commands) met += c.goal_met;
  rep.metrics["goals met"] = met;
  return rep;
}

void aggregate(TrialReport& tr) {
  std::map<std::string, std::vector<double>> group_means;
  std::map<std::string, std::vector<double>> concept_vals;
  std::map<std::string, std::vector<double>> metric_vals;
  int evaluated = 0, correct = 0;
  for (auto& r : tr.runs) {
    std::map<std::string, std::pair<double, int>> g;
    for (auto& [name, c] : r.concepts) {
      g[c.group].first += c.examples;
      ++g[c.group].second;
      concept_vals[name].push_back(c.examples);
    }
    for (auto& [name, v] : g) group_means[name].push_back(v.first / v.second);
    for (auto& [k, v] : r.metrics) metric_vals[k].push_back(v);
    evaluated += r.evaluated;
    correct += r.correct;
    if (!r.converged) tr.notes.push_back("run with seed " + std::to_string(r.seed) + " did not converge");
  }
  auto mean = [](const std::vector<double>& v) { return std::accumulate(v.begin(), v.end(), 0.0) / v.size(); };
  for (auto& [k, v] : group_means) tr.avg_examples[k] = mean(v);
  for (auto& [k, v] : concept_vals) tr.avg_concept_examples[k] = mean(v);
  for (auto& [k, v] : metric_vals) tr.metrics[k] = mean(v);
  tr.accuracy = evaluated ? double(correct) / evaluated : 0;
}

}  // namespace

void set_trace(std::ostream* out) { g_trace = out; }

std::vector<Arrangement> arrangements(const std::string& prep, int n, int positive, std::mt19937_64& rng) {
  std::vector<Arrangement> v;
  for (int i = 0; i < n; ++i) v.push_back(sample_arrangement(prep, i < positive, rng));
  shuffle(v, rng);
  return v;
}

void Latency::add(double s) {
  ++count;
  max = std::max(max, s);
  mean += (s - mean) / count;
}

Exchange converse(Agent& a, SimulatedEnvironment& env, ScriptedInstructor& ins, const std::string& text,
                  std::optional<ObjectId> click, int turn_cap, Latency* latency, const ReplyHook& hook) {
  Exchange ex;
  std::string say = text;
  auto clk = click;
  for (int turn = 0;; ++turn) {
    if (clk) a.select(*clk);
    if (g_trace) *g_trace << "> " << say << (clk ? " [" + clk->str() + "]" : "") << "\n";
    auto r = a.hear(say);
    if (g_trace)
      for (auto& m : r.moves) {
        if (m.utterance) *g_trace << "  " << m.segment << ": " << m.utterance->text << "\n";
        if (m.action) *g_trace << "  " << m.segment << ": (" << world::describe(*m.action) << ")\n";
      }
    ++ex.instructor_utterances;
    ex.questions += r.questions;
    if (latency) latency->add(r.seconds);
    std::optional<dialog::Utterance> last;
    for (auto& m : r.moves)
      if (m.utterance) last = m.utterance;
    ex.cycles.push_back(std::move(r));
    if (last) {
      ex.last_said = last->text;
      ex.last_template = last->tmpl;
    }
    if (!last || !language::template_info(last->tmpl).expects_reply || a.stack().empty()) break;
    // past the cap the instructor backs out of whatever is still open
    if (turn >= turn_cap + 20) break;
    std::optional<Reply> rep;
    if (turn >= turn_cap) rep = Reply{"never mind", {}};
    if (!rep && hook) rep = hook(*last);
    if (!rep) rep = ins.answer(*last, env.scene_mut());
    if (!rep) break;
    // the same instruction refused again: give up on the command
    bool refused = std::any_of(ex.cycles.back().moves.begin(), ex.cycles.back().moves.end(), [](auto& m) {
      return m.utterance && m.utterance->tmpl == language::TemplateId::ReportCannot;
    });
    if (refused && rep->text == say) rep = Reply{"never mind", {}};
    say = rep->text;
    clk = rep->click;
  }
  return ex;
}

TrialReport run_category(const std::string& category, const HarnessConfig& cfg, std::uint64_t seed) {
  if (category == "combined") return run_combined(cfg, seed);
  auto t0 = std::chrono::steady_clock::now();
  TrialReport tr;
  tr.category = category;
  tr.seed = seed;
  std::vector<PropertyKind> props;
  if (category == "nouns") props = {PropertyKind::Color, PropertyKind::Size, PropertyKind::Shape};
  else if (category == "color") props = {PropertyKind::Color};
  else if (category == "size") props = {PropertyKind::Size};
  else if (category == "shape") props = {PropertyKind::Shape};
  else if (category != "prepositions" && category != "verbs")
    throw FormatError("unknown category '" + category + "'");

  for (int run = 0; run < cfg.runs; ++run) {
    auto rs = derive(seed, 1000 + run);
    if (!props.empty()) {
      // one report per run, merging the properties
      RunReport merged;
      merged.seed = rs;
      merged.converged = true;
      for (auto p : props) {
        auto pt = std::chrono::steady_clock::now();
        auto r = nouns_run(p, cfg, derive(rs, static_cast<int>(p)), tr.latency);
        tr.timings[perception::property_name(p)] += seconds_since(pt);
        for (auto& [k, c] : r.concepts) merged.concepts[k] = c;
        for (auto& [k, v] : r.trials_by_group) merged.trials_by_group[k] = v;
        for (auto& [k, v] : r.metrics) merged.metrics[k] = v;
        merged.trials += r.trials;
        merged.converged = merged.converged && r.converged;
        merged.evaluated += r.evaluated;
        merged.correct += r.correct;
      }
      tr.runs.push_back(std::move(merged));
    } else if (category == "prepositions") {
      tr.runs.push_back(prepositions_run(cfg, rs, tr.latency));
    } else {
      tr.runs.push_back(verbs_run(cfg, rs, tr.latency));
    }
  }
  aggregate(tr);
  tr.wall_seconds = seconds_since(t0);
  tr.timings[category] = tr.wall_seconds;
  return tr;
}

TrialReport run_combined(const HarnessConfig& cfg, std::uint64_t seed) {
  auto t0 = std::chrono::steady_clock::now();
  TrialReport tr;
  tr.category = "combined";
  tr.seed = seed;
  for (int run = 0; run < cfg.runs; ++run) tr.runs.push_back(combined_run(cfg, derive(seed, 1000 + run), tr.latency));
  aggregate(tr);
  tr.wall_seconds = seconds_since(t0);
  tr.timings["combined"] = tr.wall_seconds;
  return tr;
}

}  // namespace grounded::harness
