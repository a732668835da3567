#pragma once

#include <array>
#include <cmath>

namespace grounded {

enum class Axis { X = 0, Y = 1, Z = 2 };
constexpr std::array<Axis, 3> kAxes{Axis::X, Axis::Y, Axis::Z};

struct Vec3 {
  double x = 0, y = 0, z = 0;

  double& operator[](Axis a) { return a == Axis::X ? x : a == Axis::Y ? y : z; }
  double operator[](Axis a) const { return a == Axis::X ? x : a == Axis::Y ? y : z; }
  bool operator==(const Vec3&) const = default;
};

// Axis-aligned box: center plus full extents. Zero extents are allowed
// (points, z-thin regions).
struct Box {
  Vec3 center;
  Vec3 extent;

  double lo(Axis a) const { return center[a] - extent[a] / 2; }
  double hi(Axis a) const { return center[a] + extent[a] / 2; }
  bool operator==(const Box&) const = default;
};

struct Workspace {
  double w = 1.0, d = 1.0, h = 0.5;

  double extent(Axis a) const { return a == Axis::X ? w : a == Axis::Y ? d : h; }
  bool contains(const Vec3& p) const {
    return p.x >= 0 && p.x <= w && p.y >= 0 && p.y <= d && p.z >= 0 && p.z <= h;
  }
  bool operator==(const Workspace&) const = default;
};

inline const char* axis_name(Axis a) { return a == Axis::X ? "x" : a == Axis::Y ? "y" : "z"; }

}  // namespace grounded
