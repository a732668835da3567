#pragma once

#include <optional>
#include <string>
#include <vector>

#include "grounded/perception/features.hpp"
#include "json.hpp"

namespace grounded::perception {

struct PerceptSymbol {
  std::string id;
  PropertyKind property = PropertyKind::Color;
  bool operator==(const PerceptSymbol&) const = default;
};

class SymbolFactory {
 public:
  PerceptSymbol new_symbol(PropertyKind p);
  const std::array<int, 3>& counters() const { return next_; }
  void set_counters(const std::array<int, 3>& c) { next_ = c; }
  bool operator==(const SymbolFactory&) const = default;

 private:
  std::array<int, 3> next_{};
};

struct Classification {
  PerceptSymbol symbol;
  double confidence = 0;
};

class PropertyClassifier {
 public:
  struct Example {
    FeatureVector features;
    PerceptSymbol symbol;
    bool operator==(const Example&) const = default;
  };

  // sigma <= 0 selects 0.1 x feature-space diameter
  explicit PropertyClassifier(PropertyKind property, int k = 3, double sigma = 0,
                              double confidence_threshold = 0.5);

  std::optional<Classification> classify(const FeatureVector& f) const;
  void train(const PerceptSymbol& symbol, const FeatureVector& f);

  PropertyKind property() const { return property_; }
  int k() const { return k_; }
  double sigma() const { return sigma_; }
  double confidence_threshold() const { return threshold_; }
  const std::vector<Example>& examples() const { return examples_; }
  std::size_t count_for(const std::string& symbol_id) const;
  bool operator==(const PropertyClassifier&) const = default;

 private:
  void check_dim(const FeatureVector& f) const;

  PropertyKind property_;
  int k_;
  double sigma_;
  double threshold_;
  std::vector<Example> examples_;
};

void to_json(nlohmann::json& j, const PerceptSymbol& s);
void from_json(const nlohmann::json& j, PerceptSymbol& s);
nlohmann::json classifier_to_json(const PropertyClassifier& c);
PropertyClassifier classifier_from_json(const nlohmann::json& j);

}  // namespace grounded::perception
