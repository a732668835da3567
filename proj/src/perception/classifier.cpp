#include "grounded/perception/classifier.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include "grounded/error.hpp"

namespace grounded::perception {

PerceptSymbol SymbolFactory::new_symbol(PropertyKind p) {
  int n = ++next_[static_cast<int>(p)];
  return {std::string(1, symbol_prefix(p)) + std::to_string(n), p};
}

PropertyClassifier::PropertyClassifier(PropertyKind property, int k, double sigma,
                                       double confidence_threshold)
    : property_(property),
      k_(k),
      sigma_(sigma > 0 ? sigma : 0.1 * diameter(property)),
      threshold_(confidence_threshold) {
  if (k_ < 1) throw std::invalid_argument("k must be positive");
  if (!(threshold_ > 0 && threshold_ <= 1)) throw std::invalid_argument("threshold out of (0,1]");
}

void PropertyClassifier::check_dim(const FeatureVector& f) const {
  if (f.size() != dimension(property_))
    throw DimensionMismatch("expected " + std::to_string(dimension(property_)) + "-d " +
                            property_name(property_) + " vector, got " + std::to_string(f.size()));
}

std::optional<Classification> PropertyClassifier::classify(const FeatureVector& f) const {
  check_dim(f);
  if (examples_.empty()) return std::nullopt;

  std::vector<std::pair<double, std::size_t>> dist;
  dist.reserve(examples_.size());
  for (std::size_t i = 0; i < examples_.size(); ++i) {
    double d2 = 0;
    for (std::size_t j = 0; j < f.size(); ++j) {
      double t = f[j] - examples_[i].features[j];
      d2 += t * t;
    }
    dist.emplace_back(d2, i);
  }
  std::size_t n = std::min<std::size_t>(k_, dist.size());
  std::partial_sort(dist.begin(), dist.begin() + n, dist.end());

  // symbol id -> (weight, first training index)
  std::map<std::string, std::pair<double, std::size_t>> votes;
  double total = 0;
  for (std::size_t i = 0; i < n; ++i) {
    double w = std::exp(-dist[i].first / (2 * sigma_ * sigma_));
    total += w;
    auto& v = votes.try_emplace(examples_[dist[i].second].symbol.id, 0.0, SIZE_MAX).first->second;
    v.first += w;
  }
  if (total <= 0) return std::nullopt;
  for (std::size_t i = 0; i < examples_.size(); ++i) {
    auto it = votes.find(examples_[i].symbol.id);
    if (it != votes.end()) it->second.second = std::min(it->second.second, i);
  }

  const std::string* best = nullptr;
  std::pair<double, std::size_t> best_v{-1, SIZE_MAX};
  for (auto& [id, v] : votes) {
    if (v.first > best_v.first || (v.first == best_v.first && v.second < best_v.second)) {
      best = &id;
      best_v = v;
    }
  }
  double conf = best_v.first / total;
  if (conf < threshold_) return std::nullopt;
  return Classification{{*best, property_}, conf};
}

void PropertyClassifier::train(const PerceptSymbol& symbol, const FeatureVector& f) {
  if (symbol.property != property_)
    throw PropertyMismatch("symbol " + symbol.id + " is not a " + property_name(property_) + " symbol");
  check_dim(f);
  examples_.push_back({f, symbol});
}

std::size_t PropertyClassifier::count_for(const std::string& symbol_id) const {
  return std::count_if(examples_.begin(), examples_.end(),
                       [&](const Example& e) { return e.symbol.id == symbol_id; });
}

void to_json(nlohmann::json& j, const PerceptSymbol& s) {
  j = {{"id", s.id}, {"property", property_name(s.property)}};
}

void from_json(const nlohmann::json& j, PerceptSymbol& s) {
  s.id = j.at("id").get<std::string>();
  auto p = property_from_name(j.at("property").get<std::string>());
  if (!p) throw FormatError("bad property " + j.at("property").dump());
  s.property = *p;
}

nlohmann::json classifier_to_json(const PropertyClassifier& c) {
  nlohmann::json ex = nlohmann::json::array();
  for (auto& e : c.examples()) ex.push_back({{"f", e.features}, {"symbol", e.symbol.id}});
  return {{"property", property_name(c.property())},
          {"k", c.k()},
          {"sigma", c.sigma()},
          {"threshold", c.confidence_threshold()},
          {"examples", ex}};
}

PropertyClassifier classifier_from_json(const nlohmann::json& j) {
  auto p = property_from_name(j.at("property").get<std::string>());
  if (!p) throw FormatError("bad classifier property");
  PropertyClassifier c(*p, j.at("k").get<int>(), j.at("sigma").get<double>(),
                       j.at("threshold").get<double>());
  for (auto& e : j.at("examples"))
    c.train({e.at("symbol").get<std::string>(), *p}, e.at("f").get<FeatureVector>());
  return c;
}

}  // namespace grounded::perception
