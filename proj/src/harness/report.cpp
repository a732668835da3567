#include <set>

#include "grounded/error.hpp"
#include "grounded/harness/protocols.hpp"

namespace grounded::harness {

using nlohmann::json;

namespace {

void check_positive(int v, const char* what) {
  if (v <= 0) throw FormatError(std::string(what) + " must be positive");
}

void check_keys(const json& j, const std::set<std::string>& allowed, const std::string& where) {
  if (!j.is_object()) throw FormatError(where + " must be an object");
  for (auto& [k, v] : j.items())
    if (!allowed.count(k)) throw FormatError("unknown key '" + k + "' in " + where);
}

}  // namespace

HarnessConfig config_from_json(const json& j) {
  HarnessConfig c;
  check_keys(j, {"version", "runs", "trial_cap", "turn_cap", "agent", "nouns", "prepositions", "verbs", "combined"},
             "config");
  c.version = j.value("version", 1);
  if (c.version != 1) throw FormatError("unsupported config version");
  c.runs = j.value("runs", c.runs);
  c.trial_cap = j.value("trial_cap", c.trial_cap);
  c.turn_cap = j.value("turn_cap", c.turn_cap);
  check_positive(c.runs, "runs");
  check_positive(c.trial_cap, "trial_cap");
  check_positive(c.turn_cap, "turn_cap");
  if (j.contains("agent")) {
    auto& a = j["agent"];
    check_keys(a, {"max_steps", "cycle_cap", "max_example_asks"}, "agent");
    c.agent.max_steps = a.value("max_steps", c.agent.max_steps);
    c.agent.cycle_cap = a.value("cycle_cap", c.agent.cycle_cap);
    c.agent.max_example_asks = a.value("max_example_asks", c.agent.max_example_asks);
  }
  if (j.contains("nouns")) {
    auto& n = j["nouns"];
    check_keys(n, {"objects", "eval_passes", "noise", "shape_noise", "shape_variation", "shape_separation"}, "nouns");
    c.nouns.objects = n.value("objects", c.nouns.objects);
    c.nouns.eval_passes = n.value("eval_passes", c.nouns.eval_passes);
    if (n.contains("noise")) {
      check_keys(n["noise"], {"color", "size"}, "nouns.noise");
      c.nouns.noise.color = n["noise"].value("color", c.nouns.noise.color);
      c.nouns.noise.size = n["noise"].value("size", c.nouns.noise.size);
    }
    c.nouns.shape_noise = n.value("shape_noise", c.nouns.shape_noise);
    c.nouns.shape_variation = n.value("shape_variation", c.nouns.shape_variation);
    c.nouns.shape_separation = n.value("shape_separation", c.nouns.shape_separation);
    check_positive(c.nouns.objects, "nouns.objects");
    if (c.nouns.eval_passes < 0) throw FormatError("nouns.eval_passes must not be negative");
  }
  if (j.contains("prepositions")) {
    auto& p = j["prepositions"];
    check_keys(p, {"per_prep", "positive"}, "prepositions");
    c.prepositions.per_prep = p.value("per_prep", c.prepositions.per_prep);
    c.prepositions.positive = p.value("positive", c.prepositions.positive);
    check_positive(c.prepositions.per_prep, "prepositions.per_prep");
    if (c.prepositions.positive < 1 || c.prepositions.positive > c.prepositions.per_prep)
      throw FormatError("prepositions.positive must be in [1, per_prep]");
  }
  if (j.contains("verbs")) {
    auto& v = j["verbs"];
    check_keys(v, {"superfluous_rate", "test_instantiations"}, "verbs");
    c.verbs.superfluous_rate = v.value("superfluous_rate", c.verbs.superfluous_rate);
    c.verbs.test_instantiations = v.value("test_instantiations", c.verbs.test_instantiations);
    if (c.verbs.superfluous_rate < 0 || c.verbs.superfluous_rate > 1)
      throw FormatError("verbs.superfluous_rate must be in [0, 1]");
  }
  if (j.contains("combined")) {
    auto& m = j["combined"];
    check_keys(m, {"commands", "objects"}, "combined");
    c.combined.commands = m.value("commands", c.combined.commands);
    c.combined.objects = m.value("objects", c.combined.objects);
    check_positive(c.combined.commands, "combined.commands");
    if (c.combined.objects < 2 || c.combined.objects > 12) throw FormatError("combined.objects must be in [2, 12]");
  }
  return c;
}

json config_to_json(const HarnessConfig& c) {
  return {{"version", c.version},
          {"runs", c.runs},
          {"trial_cap", c.trial_cap},
          {"turn_cap", c.turn_cap},
          {"agent",
           {{"max_steps", c.agent.max_steps},
            {"cycle_cap", c.agent.cycle_cap},
            {"max_example_asks", c.agent.max_example_asks}}},
          {"nouns",
           {{"objects", c.nouns.objects},
            {"eval_passes", c.nouns.eval_passes},
            {"noise", {{"color", c.nouns.noise.color}, {"size", c.nouns.noise.size}}},
            {"shape_noise", c.nouns.shape_noise},
            {"shape_variation", c.nouns.shape_variation},
            {"shape_separation", c.nouns.shape_separation}}},
          {"prepositions", {{"per_prep", c.prepositions.per_prep}, {"positive", c.prepositions.positive}}},
          {"verbs",
           {{"superfluous_rate", c.verbs.superfluous_rate}, {"test_instantiations", c.verbs.test_instantiations}}},
          {"combined", {{"commands", c.combined.commands}, {"objects", c.combined.objects}}}};
}

bool TrialReport::same_outcome(const TrialReport& o) const {
  return version == o.version && category == o.category && seed == o.seed && runs == o.runs &&
         avg_examples == o.avg_examples && avg_concept_examples == o.avg_concept_examples &&
         accuracy == o.accuracy && metrics == o.metrics && latency.count == o.latency.count && notes == o.notes;
}

json report_to_json(const TrialReport& r) {
  json runs = json::array();
  for (auto& run : r.runs) {
    json concepts = json::object();
    for (auto& [k, c] : run.concepts)
      concepts[k] = {{"group", c.group}, {"examples", c.examples}, {"passed", c.passed}, {"failed", c.failed}};
    json commands = json::array();
    for (auto& c : run.commands)
      commands.push_back({{"command", c.command},
                          {"agent_initiated", c.agent_initiated},
                          {"instructor_utterances", c.instructor_utterances},
                          {"goal_met", c.goal_met}});
    runs.push_back({{"seed", run.seed},
                    {"trials", run.trials},
                    {"converged", run.converged},
                    {"concepts", concepts},
                    {"trials_by_group", run.trials_by_group},
                    {"evaluated", run.evaluated},
                    {"correct", run.correct},
                    {"commands", commands},
                    {"metrics", run.metrics}});
  }
  return {{"version", r.version},
          {"category", r.category},
          {"seed", r.seed},
          {"runs", runs},
          {"avg_examples", r.avg_examples},
          {"avg_concept_examples", r.avg_concept_examples},
          {"accuracy", r.accuracy},
          {"metrics", r.metrics},
          {"latency", {{"count", r.latency.count}, {"max", r.latency.max}, {"mean", r.latency.mean}}},
          {"timings", r.timings},
          {"wall_seconds", r.wall_seconds},
          {"notes", r.notes}};
}

TrialReport report_from_json(const json& j) {
  TrialReport r;
  r.version = j.at("version");
  if (r.version != 1) throw FormatError("unsupported report version");
  r.category = j.at("category");
  r.seed = j.at("seed");
  for (auto& rj : j.at("runs")) {
    RunReport run;
    run.seed = rj.at("seed");
    run.trials = rj.at("trials");
    run.converged = rj.at("converged");
    for (auto& [k, c] : rj.at("concepts").items())
      run.concepts[k] = {c.at("group"), c.at("examples"), c.at("passed"), c.at("failed")};
    run.trials_by_group = rj.at("trials_by_group").get<std::map<std::string, int>>();
    run.evaluated = rj.at("evaluated");
    run.correct = rj.at("correct");
    for (auto& c : rj.at("commands"))
      run.commands.push_back({c.at("command"), c.at("agent_initiated"), c.at("instructor_utterances"), c.at("goal_met")});
    run.metrics = rj.at("metrics").get<std::map<std::string, double>>();
    r.runs.push_back(std::move(run));
  }
  r.avg_examples = j.at("avg_examples").get<std::map<std::string, double>>();
  r.avg_concept_examples = j.at("avg_concept_examples").get<std::map<std::string, double>>();
  r.accuracy = j.at("accuracy");
  r.metrics = j.at("metrics").get<std::map<std::string, double>>();
  auto& l = j.at("latency");
  r.latency = {l.at("count"), l.at("max"), l.at("mean")};
  r.timings = j.at("timings").get<std::map<std::string, double>>();
  r.wall_seconds = j.at("wall_seconds");
  r.notes = j.at("notes").get<std::vector<std::string>>();
  return r;
}

}  // namespace grounded::harness
