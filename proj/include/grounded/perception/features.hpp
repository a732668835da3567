#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <string_view>
#include <vector>

namespace grounded::perception {

enum class PropertyKind { Color = 0, Size = 1, Shape = 2 };
constexpr std::array<PropertyKind, 3> kProperties{PropertyKind::Color, PropertyKind::Size,
                                                  PropertyKind::Shape};

using FeatureVector = std::vector<double>;

// footprint area that maps to size feature 1.0
inline constexpr double kSizeAreaNorm = 0.04;

std::size_t dimension(PropertyKind p);
double diameter(PropertyKind p);  // of the unit hypercube the features live in
const char* property_name(PropertyKind p);
std::optional<PropertyKind> property_from_name(std::string_view name);
char symbol_prefix(PropertyKind p);

FeatureVector color_features(const std::array<double, 3>& rgb);
FeatureVector size_features(double width, double depth);
FeatureVector shape_features(const std::array<double, 3>& descriptor);

}  // namespace grounded::perception
