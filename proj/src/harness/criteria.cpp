#include "grounded/harness/criteria.hpp"

#include <algorithm>
#include <sstream>

namespace grounded::harness {

namespace {

double get(const std::map<std::string, double>& m, const std::string& k, double dflt = -1) {
  auto it = m.find(k);
  return it == m.end() ? dflt : it->second;
}

std::string fmt(double v) {
  std::ostringstream o;
  o.precision(4);
  o << v;
  return o.str();
}

// worst value of a metric over the runs
double worst(const TrialReport& r, const std::string& k, bool high_is_bad) {
  double w = high_is_bad ? -1e300 : 1e300;
  for (auto& run : r.runs) {
    double v = get(run.metrics, k, high_is_bad ? 1e300 : -1e300);
    w = high_is_bad ? std::max(w, v) : std::min(w, v);
  }
  return w;
}

void nouns(const TrialReport& r, std::vector<Criterion>& out) {
  auto& ex = r.avg_examples;
  bool has_color = ex.count("color"), has_size = ex.count("size"), has_shape = ex.count("shape");
  if (has_color) {
    double e = ex.at("color"), t = get(r.timings, "color", 1e9);
    bool conv = get(r.metrics, "converged_color") == 1;
    out.push_back({"color learning", conv && e <= 1.5 && t < 10,
                   "avg " + fmt(e) + " examples/color, " + fmt(t) + " s, converged " + (conv ? "yes" : "no")});
  }
  if (has_size) {
    double e = ex.at("size");
    bool conv = get(r.metrics, "converged_size") == 1;
    out.push_back({"size learning", conv && e <= 2.5,
                   "avg " + fmt(e) + " examples/size, converged " + (conv ? "yes" : "no")});
  }
  if (has_shape) {
    double e = ex.at("shape"), acc = get(r.metrics, "accuracy_shape", 0);
    bool conv = get(r.metrics, "converged_shape") == 1;
    bool ratio = !has_color || e > 3 * ex.at("color");
    std::string d = "avg " + fmt(e) + " examples/shape";
    if (has_color) d += " vs " + fmt(3 * ex.at("color")) + " (3x color)";
    d += ", accuracy " + fmt(acc) + ", converged " + (conv ? "yes" : "no");
    out.push_back({"shape learning", conv && ratio && acc >= 0.95, d});
  }
}

void prepositions(const TrialReport& r, std::vector<Criterion>& out) {
  double e = get(r.avg_examples, "preposition", 1e9);
  double near = get(r.avg_concept_examples, "near"), behind = get(r.avg_concept_examples, "behind");
  out.push_back({"prepositions", r.accuracy >= 0.93 && e <= 5 && near > behind && behind == 1,
                 "accuracy " + fmt(r.accuracy) + ", avg " + fmt(e) + " examples/prep, near " + fmt(near) +
                     ", behind " + fmt(behind)});
}

void verbs(const TrialReport& r, std::vector<Criterion>& out) {
  double e = get(r.avg_examples, "template", 1e9);
  double rx = worst(r, "right of examples", true);
  double inst = worst(r, "right of instantiations", false), ok = worst(r, "right of correct", false);
  double sup = worst(r, "superfluous in rules", true);
  out.push_back({"verbs", e <= 2 && rx <= 2 && inst == 64 && ok == 64 && sup == 0,
                 "avg " + fmt(e) + " examples/template, right-of taught from " + fmt(rx) + " examples, " +
                     fmt(ok) + "/" + fmt(inst) + " instantiations correct, superfluous actions in rules " +
                     fmt(sup)});
}

void combined(const TrialReport& r, std::vector<Criterion>& out) {
  int first = 1 << 30;
  bool last_ok = !r.runs.empty();
  for (auto& run : r.runs) {
    if (run.commands.size() < 3) {
      last_ok = false;
      continue;
    }
    first = std::min(first, run.commands.front().agent_initiated);
    for (auto it = run.commands.end() - 3; it != run.commands.end(); ++it)
      last_ok = last_ok && it->instructor_utterances == 1;
  }
  if (r.runs.empty()) first = 0;
  out.push_back({"combined curve", first >= 10 && last_ok,
                 "first command " + std::to_string(first) + " agent-initiated interactions (worst run), last 3 at one "
                     "utterance: " + (last_ok ? "yes" : "no")});
}

}  // namespace

std::vector<Criterion> category_criteria(const TrialReport& r) {
  std::vector<Criterion> out;
  auto& c = r.category;
  if (c == "nouns" || c == "color" || c == "size" || c == "shape") nouns(r, out);
  else if (c == "prepositions") prepositions(r, out);
  else if (c == "verbs") verbs(r, out);
  else if (c == "combined") combined(r, out);
  out.push_back({"reactivity (" + c + ")", r.latency.max < kLatencyLimit,
                 "max " + fmt(r.latency.max) + " s over " + std::to_string(r.latency.count) + " responses"});
  return out;
}

}  // namespace grounded::harness
