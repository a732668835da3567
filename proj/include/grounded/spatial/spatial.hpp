#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <random>
#include <string>

#include "grounded/geometry.hpp"
#include "json.hpp"

namespace grounded::spatial {

enum class Relation : std::uint8_t { Aligned = 1, GreaterThan = 2, LessThan = 4 };
constexpr std::array<Relation, 3> kRelations{Relation::Aligned, Relation::GreaterThan, Relation::LessThan};

const char* relation_name(Relation r);
Relation relation_from_name(const std::string& s);

struct Primitives {
  std::array<Relation, 3> rel{};
  std::array<double, 3> dist{};  // closest-surface gap per axis

  Relation operator[](Axis a) const { return rel[static_cast<int>(a)]; }
  double gap(Axis a) const { return dist[static_cast<int>(a)]; }
};

Primitives extract_primitives(const Box& primary, const Box& reference);

struct DistStats {
  int count = 0;
  double min = 0, max = 0, mean = 0;
  double span() const { return max - min; }
  bool operator==(const DistStats&) const = default;
};

class RelationSet {
 public:
  bool contains(Relation r) const { return bits_ & static_cast<std::uint8_t>(r); }
  void insert(Relation r) { bits_ |= static_cast<std::uint8_t>(r); }
  bool empty() const { return bits_ == 0; }
  int size() const { return __builtin_popcount(bits_); }
  bool operator==(const RelationSet&) const = default;

 private:
  std::uint8_t bits_ = 0;
};

// distance statistics are collected from the examples whose relation on that
// axis was strict; an aligned pair says nothing about separation
struct SpatialComposition {
  std::array<RelationSet, 3> allowed{};
  std::array<DistStats, 3> dist{};
  int example_count = 0;
  bool ever_all_aligned = false;

  const RelationSet& on(Axis a) const { return allowed[static_cast<int>(a)]; }
  const DistStats& stats(Axis a) const { return dist[static_cast<int>(a)]; }
  bool window_active(Axis a, const Workspace& ws) const;
  bool operator==(const SpatialComposition&) const = default;
};

inline constexpr double kWindowSpanFraction = 0.5;
inline constexpr double kWindowSlack = 0.2;
inline constexpr double kWindowMinSlack = 0.02;

SpatialComposition learn_example(const std::optional<SpatialComposition>& comp, const Primitives& p);

bool evaluate(const SpatialComposition& comp, const Primitives& p, const Workspace& ws);
bool evaluate(const SpatialComposition& comp, const Box& primary, const Box& reference, const Workspace& ws);

struct Projection {
  Vec3 point;
  std::array<Relation, 3> chosen{};
};

// `primary` supplies the extents of the object to be placed
Projection project(const SpatialComposition& comp, const Box& primary, const Box& reference,
                   const Workspace& ws, std::mt19937_64& rng);

nlohmann::json composition_to_json(const SpatialComposition& c);
SpatialComposition composition_from_json(const nlohmann::json& j);

}  // namespace grounded::spatial
