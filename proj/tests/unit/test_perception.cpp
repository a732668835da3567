#include <cmath>
#include <random>

#include "doctest.h"
#include "grounded/error.hpp"
#include "grounded/perception/classifier.hpp"

using namespace grounded;
using namespace grounded::perception;

namespace {

// brute-force weighted vote, written independently of the classifier
std::optional<std::pair<std::string, double>> vote_oracle(const std::vector<PropertyClassifier::Example>& ex,
                                                          int k, double sigma, double thr,
                                                          const FeatureVector& q) {
  if (ex.empty()) return std::nullopt;
  std::vector<std::tuple<double, std::size_t>> all;
  for (std::size_t i = 0; i < ex.size(); ++i) {
    double s = 0;
    for (std::size_t d = 0; d < q.size(); ++d) s += std::pow(q[d] - ex[i].features[d], 2);
    all.emplace_back(s, i);
  }
  std::sort(all.begin(), all.end());
  std::vector<std::string> ids;
  std::vector<double> w;
  std::vector<std::size_t> first;
  double total = 0;
  for (std::size_t n = 0; n < std::min<std::size_t>(k, all.size()); ++n) {
    auto [d2, i] = all[n];
    double wt = std::exp(-d2 / (2 * sigma * sigma));
    total += wt;
    auto it = std::find(ids.begin(), ids.end(), ex[i].symbol.id);
    if (it == ids.end()) {
      ids.push_back(ex[i].symbol.id);
      w.push_back(wt);
      std::size_t f = 0;
      while (ex[f].symbol.id != ex[i].symbol.id) ++f;
      first.push_back(f);
    } else {
      w[it - ids.begin()] += wt;
    }
  }
  if (total <= 0) return std::nullopt;
  std::size_t b = 0;
  for (std::size_t i = 1; i < ids.size(); ++i)
    if (w[i] > w[b] || (w[i] == w[b] && first[i] < first[b])) b = i;
  if (w[b] / total < thr) return std::nullopt;
  return std::make_pair(ids[b], w[b] / total);
}

FeatureVector rand_vec(std::mt19937_64& rng, std::size_t dim, double lo = 0, double hi = 1) {
  std::uniform_real_distribution<double> u(lo, hi);
  FeatureVector f(dim);
  for (auto& v : f) v = u(rng);
  return f;
}

}  // namespace

TEST_CASE("empty classifier is unknown") {
  PropertyClassifier c(PropertyKind::Color);
  CHECK_FALSE(c.classify({0.2, 0.3, 0.4}).has_value());
}

TEST_CASE("defaults") {
  PropertyClassifier c(PropertyKind::Shape);
  CHECK(c.k() == 3);
  CHECK(c.confidence_threshold() == 0.5);
  CHECK(c.sigma() == doctest::Approx(0.1 * std::sqrt(3.0)));
  CHECK(PropertyClassifier(PropertyKind::Size).sigma() == doctest::Approx(0.1));
}

TEST_CASE("single example votes with full confidence") {
  SymbolFactory f;
  PropertyClassifier c(PropertyKind::Color);
  auto s = f.new_symbol(PropertyKind::Color);
  c.train(s, {1, 0, 0});
  auto r = c.classify({1, 0, 0});
  REQUIRE(r);
  CHECK(r->symbol == s);
  CHECK(r->confidence == 1.0);
  // far away the single symbol still wins the (one-member) vote
  auto far = c.classify({0, 1, 1});
  REQUIRE(far);
  CHECK(far->symbol == s);
}

TEST_CASE("cluster centroids match the exhaustive vote") {
  std::mt19937_64 rng(11);
  SymbolFactory f;
  PropertyClassifier c(PropertyKind::Color);
  std::vector<FeatureVector> centers{{0.1, 0.1, 0.1}, {0.9, 0.1, 0.5}, {0.5, 0.9, 0.9}};
  std::vector<PerceptSymbol> syms;
  for (auto& ctr : centers) {
    syms.push_back(f.new_symbol(PropertyKind::Color));
    std::normal_distribution<double> n(0, 0.03);
    for (int i = 0; i < 5; ++i) c.train(syms.back(), {ctr[0] + n(rng), ctr[1] + n(rng), ctr[2] + n(rng)});
  }
  for (std::size_t i = 0; i < centers.size(); ++i) {
    auto r = c.classify(centers[i]);
    auto o = vote_oracle(c.examples(), 3, c.sigma(), 0.5, centers[i]);
    REQUIRE(r);
    REQUIRE(o);
    CHECK(r->symbol == syms[i]);
    CHECK(o->first == syms[i].id);
  }
}

TEST_CASE("train then classify returns the trained symbol") {
  SymbolFactory f;
  PropertyClassifier c(PropertyKind::Shape);
  auto a = f.new_symbol(PropertyKind::Shape), b = f.new_symbol(PropertyKind::Shape);
  c.train(a, {0.2, 0.2, 0.2});
  c.train(b, {0.25, 0.2, 0.2});
  auto r = c.classify({0.25, 0.2, 0.2});
  REQUIRE(r);
  CHECK(r->symbol == b);
}

TEST_CASE("second symbol in a disjoint region leaves the first region alone") {
  std::mt19937_64 rng(5);
  SymbolFactory f;
  PropertyClassifier c(PropertyKind::Color);
  auto a = f.new_symbol(PropertyKind::Color);
  for (int i = 0; i < 4; ++i) c.train(a, rand_vec(rng, 3, 0.0, 0.2));
  std::vector<FeatureVector> queries;
  for (int i = 0; i < 30; ++i) queries.push_back(rand_vec(rng, 3, 0.0, 0.2));
  std::vector<std::optional<Classification>> before;
  for (auto& q : queries) before.push_back(c.classify(q));
  auto b = f.new_symbol(PropertyKind::Color);
  for (int i = 0; i < 4; ++i) c.train(b, rand_vec(rng, 3, 0.8, 1.0));
  for (std::size_t i = 0; i < queries.size(); ++i) {
    auto r = c.classify(queries[i]);
    auto o = vote_oracle(c.examples(), 3, c.sigma(), 0.5, queries[i]);
    REQUIRE(r);
    CHECK(r->symbol == before[i]->symbol);
    CHECK(o->first == r->symbol.id);
  }
}

TEST_CASE("interleaved training equals batch construction") {
  std::mt19937_64 rng(8);
  SymbolFactory f;
  std::vector<PerceptSymbol> syms{f.new_symbol(PropertyKind::Color), f.new_symbol(PropertyKind::Color)};
  PropertyClassifier live(PropertyKind::Color), batch(PropertyKind::Color);
  std::vector<std::pair<PerceptSymbol, FeatureVector>> seq;
  for (int i = 0; i < 20; ++i) {
    seq.emplace_back(syms[i % 2], rand_vec(rng, 3));
    live.train(seq.back().first, seq.back().second);
    (void)live.classify(rand_vec(rng, 3));
  }
  for (auto& [s, v] : seq) batch.train(s, v);
  CHECK(live == batch);
}

TEST_CASE("symbols are fresh and typed") {
  SymbolFactory f;
  auto a = f.new_symbol(PropertyKind::Color), b = f.new_symbol(PropertyKind::Color);
  CHECK(a.id != b.id);
  CHECK(a.property == PropertyKind::Color);
  CHECK(a.id == "c1");
  CHECK(f.new_symbol(PropertyKind::Shape).id == "h1");
  CHECK(f.new_symbol(PropertyKind::Size).id == "s1");
}

TEST_CASE("errors") {
  SymbolFactory f;
  PropertyClassifier c(PropertyKind::Size);
  CHECK_THROWS_AS(c.classify({1, 2}), DimensionMismatch);
  CHECK_THROWS_AS(c.train(f.new_symbol(PropertyKind::Color), {0.5}), PropertyMismatch);
  CHECK_THROWS_AS(c.train(f.new_symbol(PropertyKind::Size), {0.5, 0.5}), DimensionMismatch);
}

TEST_CASE("property: classifier agrees with the vote oracle") {
  std::mt19937_64 rng(2024);
  for (int inst = 0; inst < 200; ++inst) {
    auto kind = kProperties[inst % 3];
    int k = 1 + inst % 5;
    double thr = inst % 2 ? 0.5 : 0.7;
    PropertyClassifier c(kind, k, 0, thr);
    SymbolFactory f;
    std::vector<PerceptSymbol> syms;
    int nsym = 1 + inst % 4;
    for (int s = 0; s < nsym; ++s) syms.push_back(f.new_symbol(kind));
    int n = inst % 17;
    for (int i = 0; i < n; ++i) c.train(syms[rng() % syms.size()], rand_vec(rng, dimension(kind)));
    for (int q = 0; q < 20; ++q) {
      auto v = rand_vec(rng, dimension(kind));
      auto r = c.classify(v);
      auto o = vote_oracle(c.examples(), k, c.sigma(), thr, v);
      REQUIRE(r.has_value() == o.has_value());
      if (r) {
        CHECK(r->symbol.id == o->first);
        CHECK(r->confidence == doctest::Approx(o->second));
      }
    }
  }
}

TEST_CASE("property: more examples of the winning symbol never flip a query") {
  std::mt19937_64 rng(77);
  for (int inst = 0; inst < 100; ++inst) {
    PropertyClassifier c(PropertyKind::Color);
    SymbolFactory f;
    std::vector<PerceptSymbol> syms{f.new_symbol(PropertyKind::Color), f.new_symbol(PropertyKind::Color),
                                    f.new_symbol(PropertyKind::Color)};
    for (int i = 0; i < 9; ++i) c.train(syms[i % 3], rand_vec(rng, 3));
    auto v = rand_vec(rng, 3);
    auto r = c.classify(v);
    if (!r) continue;
    for (int i = 0; i < 5; ++i) {
      c.train(r->symbol, rand_vec(rng, 3));
      auto again = c.classify(v);
      REQUIRE(again);
      CHECK(again->symbol == r->symbol);
    }
  }
}

TEST_CASE("one symbol can own disjoint regions") {
  SymbolFactory f;
  PropertyClassifier c(PropertyKind::Color, 1);
  auto a = f.new_symbol(PropertyKind::Color), b = f.new_symbol(PropertyKind::Color);
  c.train(a, {0, 0, 0});
  c.train(b, {0.5, 0.5, 0.5});
  c.train(a, {1, 1, 1});
  CHECK(c.classify({0.05, 0, 0})->symbol == a);
  CHECK(c.classify({0.95, 1, 1})->symbol == a);
  CHECK(c.classify({0.5, 0.45, 0.5})->symbol == b);
}

TEST_CASE("classifier json round trip") {
  std::mt19937_64 rng(3);
  SymbolFactory f;
  PropertyClassifier c(PropertyKind::Shape);
  for (int i = 0; i < 7; ++i) c.train(f.new_symbol(PropertyKind::Shape), rand_vec(rng, 3));
  auto back = classifier_from_json(nlohmann::json::parse(classifier_to_json(c).dump()));
  CHECK(back == c);
}
