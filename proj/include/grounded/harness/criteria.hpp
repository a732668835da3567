#pragma once

#include <string>
#include <vector>

#include "grounded/harness/protocols.hpp"

namespace grounded::harness {

struct Criterion {
  std::string name;
  bool pass = false;
  std::string detail;  // the measured values
};

// the pass/fail checks that apply to a report of this category
std::vector<Criterion> category_criteria(const TrialReport& r);

constexpr double kLatencyLimit = 1.1;

}  // namespace grounded::harness
