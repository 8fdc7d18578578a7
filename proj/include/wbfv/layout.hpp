#pragma once

#include <array>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "wbfv/coupling.hpp"
#include "wbfv/geometry.hpp"
#include "wbfv/mesh.hpp"

namespace wbfv {

/// A geometric primitive described by a signed distance (negative inside).
/// Regions are immutable value types sharing their subtrees.
class Region {
 public:
  static Region empty();
  /// {x : n . x <= c}, with n normalized internally.
  static Region half_plane(Vec2 normal, double offset);
  static Region disk(Vec2 center, double radius);
  static Region annulus(Vec2 center, double inner_radius, double outer_radius);
  static Region triangle(Vec2 a, Vec2 b, Vec2 c);
  /// a \ b
  static Region difference(const Region& a, const Region& b);

  double signed_distance(Vec2 p) const;
  bool contains(Vec2 p) const { return signed_distance(p) < 0.0; }
  /// Canonical text form, e.g. "annulus(0, 0, 0.3, 0.4)"; parse_region inverts it.
  std::string to_string() const;
  bool operator==(const Region& o) const { return to_string() == o.to_string(); }

 private:
  enum class Kind { kEmpty, kHalfPlane, kDisk, kAnnulus, kTriangle, kDifference };
  struct Node;
  explicit Region(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
  std::shared_ptr<const Node> node_;
};

/// Parse the text form of a region; throws LayoutError naming the problem.
Region parse_region(const std::string& text);

/// Per-component domains D_1..D_L plus the regularization width.
struct DomainLayout {
  std::vector<Region> regions;
  /// Width of the smoothstep transition across each domain boundary.
  double regularization_width = 0.0;

  std::size_t components() const { return regions.size(); }
  /// Regularized indicator vector v_0(x); components in [0, 1].
  ColorVector indicator(Vec2 p) const;
};

/// Smoothstep s(t) = 3t^2 - 2t^3 of the signed distance: 1 deep inside, 0
/// outside, transition of total width `width` centered on the boundary.
double regularized_indicator(double signed_distance, double width);

/// Per-edge color vectors v_e (edge averages of the regularized indicator).
class ColorField {
 public:
  ColorField(std::size_t components, std::vector<ColorVector> values)
      : components_(components), values_(std::move(values)) {}

  std::size_t components() const { return components_; }
  std::size_t size() const { return values_.size(); }
  const ColorVector& operator[](std::size_t edge) const { return values_[edge]; }
  const std::vector<ColorVector>& values() const { return values_; }

 private:
  std::size_t components_;
  std::vector<ColorVector> values_;
};

/// Gauss-Legendre edge averages of layout.indicator. Values that leave the
/// simplex by at most 1e-12 are projected back; larger excursions throw
/// LayoutError.
ColorField build_color_field(const PrimalMesh& mesh, const DomainLayout& layout, std::size_t quadrature_order = 4);

/// Same color vector on every edge.
ColorField uniform_color_field(const PrimalMesh& mesh, const ColorVector& v);

/// Alpha-weighted average of the edge colors around each cell (for output).
std::vector<ColorVector> cell_colors(const PrimalMesh& mesh, const DualGeometry& dual, const ColorField& color);

}  // namespace wbfv
