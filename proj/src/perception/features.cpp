#include "grounded/perception/features.hpp"

#include <cmath>

namespace grounded::perception {

std::size_t dimension(PropertyKind p) { return p == PropertyKind::Size ? 1 : 3; }

double diameter(PropertyKind p) { return std::sqrt(static_cast<double>(dimension(p))); }

const char* property_name(PropertyKind p) {
  switch (p) {
    case PropertyKind::Color: return "color";
    case PropertyKind::Size: return "size";
    case PropertyKind::Shape: return "shape";
  }
  return "?";
}

std::optional<PropertyKind> property_from_name(std::string_view name) {
  for (auto p : kProperties)
    if (name == property_name(p)) return p;
  return std::nullopt;
}

char symbol_prefix(PropertyKind p) {
  switch (p) {
    case PropertyKind::Color: return 'c';
    case PropertyKind::Size: return 's';
    case PropertyKind::Shape: return 'h';
  }
  return '?';
}

FeatureVector color_features(const std::array<double, 3>& rgb) { return {rgb[0], rgb[1], rgb[2]}; }

FeatureVector size_features(double width, double depth) { return {width * depth / kSizeAreaNorm}; }

FeatureVector shape_features(const std::array<double, 3>& d) { return {d[0], d[1], d[2]}; }

}  // namespace grounded::perception
