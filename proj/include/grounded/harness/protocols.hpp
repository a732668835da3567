#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <random>
#include <iosfwd>
#include <string>
#include <vector>

#include "grounded/agent/agent.hpp"
#include "grounded/harness/instructor.hpp"
#include "grounded/world/scene_spec.hpp"
#include "json.hpp"

namespace grounded::harness {

struct NounsConfig {
  int objects = 12;
  int eval_passes = 10;
  world::NoiseConfig noise;
  // shape features are the hard ones: each instance sits far from its prototype
  double shape_noise = 0.07;
  double shape_variation = 0.6;
  double shape_separation = 0.2;
};

struct PrepositionsConfig {
  int per_prep = 24;
  int positive = 18;
};

struct VerbsConfig {
  double superfluous_rate = 0.3;
  int test_instantiations = 5;
};

struct CombinedConfig {
  int commands = 24;
  int objects = 6;
};

struct HarnessConfig {
  int version = 1;
  int runs = 3;
  int trial_cap = 40;
  int turn_cap = 60;  // instructor turns per command before giving up on it
  agent::AgentConfig agent;
  NounsConfig nouns;
  PrepositionsConfig prepositions;
  VerbsConfig verbs;
  CombinedConfig combined;
};

HarnessConfig config_from_json(const nlohmann::json& j);
nlohmann::json config_to_json(const HarnessConfig& c);

struct ConceptStats {
  std::string group;  // color/size/shape, preposition, template
  int examples = 0;
  int passed = 0;
  int failed = 0;
  bool operator==(const ConceptStats&) const = default;
};

struct CommandCount {
  std::string command;
  int agent_initiated = 0;  // questions the agent asked
  int instructor_utterances = 0;
  bool goal_met = false;
  bool operator==(const CommandCount&) const = default;
};

struct RunReport {
  std::uint64_t seed = 0;
  int trials = 0;
  bool converged = false;
  std::map<std::string, ConceptStats> concepts;
  std::map<std::string, int> trials_by_group;
  int evaluated = 0;
  int correct = 0;
  std::vector<CommandCount> commands;
  std::map<std::string, double> metrics;
  bool operator==(const RunReport&) const = default;
};

struct Latency {
  int count = 0;
  double max = 0, mean = 0;
  void add(double s);
  bool operator==(const Latency&) const = default;
};

struct TrialReport {
  int version = 1;
  std::string category;
  std::uint64_t seed = 0;
  std::vector<RunReport> runs;
  std::map<std::string, double> avg_examples;  // per group, averaged over concepts and runs
  std::map<std::string, double> avg_concept_examples;
  double accuracy = 0;
  std::map<std::string, double> metrics;  // averaged over runs
  Latency latency;
  std::map<std::string, double> timings;  // wall-clock seconds per group
  double wall_seconds = 0;
  std::vector<std::string> notes;  // non-convergence and similar

  // everything but wall-clock measurements
  bool same_outcome(const TrialReport& o) const;
};

nlohmann::json report_to_json(const TrialReport& r);
TrialReport report_from_json(const nlohmann::json& j);

// two small blocks for a preposition test: primary at (px, py), reference at (rx, ry)
struct Arrangement {
  std::string prep;
  double px = 0, py = 0, rx = 0, ry = 0;
  bool positive = true;
};
inline constexpr double kPrepBlock = 0.06;

// n arrangements, the first `positive` of them satisfying the preposition, shuffled
std::vector<Arrangement> arrangements(const std::string& prep, int n, int positive, std::mt19937_64& rng);

TrialReport run_category(const std::string& category, const HarnessConfig& cfg, std::uint64_t seed);
TrialReport run_combined(const HarnessConfig& cfg, std::uint64_t seed);

// the instructor side of one exchange: say something, then answer questions
// until the agent stops asking
struct Exchange {
  int instructor_utterances = 0;
  int questions = 0;
  std::vector<agent::CycleResult> cycles;
  std::string last_said;
  std::optional<language::TemplateId> last_template;
};

// every utterance, reply and action of every exchange goes here when set
void set_trace(std::ostream* out);

using ReplyHook = std::function<std::optional<Reply>(const dialog::Utterance&)>;

Exchange converse(agent::Agent& a, agent::SimulatedEnvironment& env, ScriptedInstructor& ins,
                  const std::string& text, std::optional<world::ObjectId> click, int turn_cap,
                  Latency* latency = nullptr, const ReplyHook& hook = {});

}  // namespace grounded::harness
