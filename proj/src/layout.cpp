#include "wbfv/layout.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <limits>

#include "wbfv/error.hpp"
#include "wbfv/quadrature.hpp"

namespace wbfv {

struct Region::Node {
  Kind kind = Kind::kEmpty;
  std::vector<double> p;
  Region a{nullptr};
  Region b{nullptr};
};

namespace {

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

double segment_distance(Vec2 p, Vec2 a, Vec2 b) {
  const Vec2 ab = b - a;
  const double len2 = dot(ab, ab);
  double t = len2 > 0.0 ? dot(p - a, ab) / len2 : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  return norm(p - (a + ab * t));
}

}  // namespace

Region Region::empty() { return Region(std::make_shared<const Node>(Node{Kind::kEmpty, {}, Region{nullptr}, Region{nullptr}})); }

Region Region::half_plane(Vec2 normal, double offset) {
  if (!(norm(normal) > 0.0)) throw LayoutError("half_plane needs a nonzero normal");
  return Region(std::make_shared<const Node>(Node{Kind::kHalfPlane, {normal.x, normal.y, offset}, Region{nullptr}, Region{nullptr}}));
}

Region Region::disk(Vec2 center, double radius) {
  if (!(radius > 0.0)) throw LayoutError("disk radius must be positive");
  return Region(std::make_shared<const Node>(Node{Kind::kDisk, {center.x, center.y, radius}, Region{nullptr}, Region{nullptr}}));
}

Region Region::annulus(Vec2 center, double inner_radius, double outer_radius) {
  if (!(inner_radius >= 0.0 && outer_radius > inner_radius)) {
    throw LayoutError("annulus needs 0 <= r_inner < r_outer");
  }
  return Region(std::make_shared<const Node>(
      Node{Kind::kAnnulus, {center.x, center.y, inner_radius, outer_radius}, Region{nullptr}, Region{nullptr}}));
}

Region Region::triangle(Vec2 a, Vec2 b, Vec2 c) {
  if (orient(a, b, c) == 0.0) throw LayoutError("degenerate triangle");
  return Region(std::make_shared<const Node>(
      Node{Kind::kTriangle, {a.x, a.y, b.x, b.y, c.x, c.y}, Region{nullptr}, Region{nullptr}}));
}

Region Region::difference(const Region& a, const Region& b) {
  return Region(std::make_shared<const Node>(Node{Kind::kDifference, {}, a, b}));
}

double Region::signed_distance(Vec2 p) const {
  const Node& n = *node_;
  const auto& q = n.p;
  switch (n.kind) {
    case Kind::kEmpty: return std::numeric_limits<double>::infinity();
    case Kind::kHalfPlane: {
      const double len = std::hypot(q[0], q[1]);
      return (q[0] * p.x + q[1] * p.y - q[2]) / len;
    }
    case Kind::kDisk: return std::hypot(p.x - q[0], p.y - q[1]) - q[2];
    case Kind::kAnnulus: {
      const double r = std::hypot(p.x - q[0], p.y - q[1]);
      return std::max(r - q[3], q[2] - r);
    }
    case Kind::kTriangle: {
      const Vec2 a{q[0], q[1]};
      const Vec2 b{q[2], q[3]};
      const Vec2 c{q[4], q[5]};
      const double d = std::min({segment_distance(p, a, b), segment_distance(p, b, c), segment_distance(p, c, a)});
      const double s = orient(a, b, c) > 0.0 ? 1.0 : -1.0;
      const bool inside = s * orient(a, b, p) > 0.0 && s * orient(b, c, p) > 0.0 && s * orient(c, a, p) > 0.0;
      return inside ? -d : d;
    }
    case Kind::kDifference: return std::max(n.a.signed_distance(p), -n.b.signed_distance(p));
  }
  return std::numeric_limits<double>::infinity();
}

std::string Region::to_string() const {
  const Node& n = *node_;
  const char* name = "";
  switch (n.kind) {
    case Kind::kEmpty: return "empty";
    case Kind::kDifference: return "difference(" + n.a.to_string() + ", " + n.b.to_string() + ")";
    case Kind::kHalfPlane: name = "half_plane"; break;
    case Kind::kDisk: name = "disk"; break;
    case Kind::kAnnulus: name = "annulus"; break;
    case Kind::kTriangle: name = "triangle"; break;
  }
  std::string s = std::string(name) + "(";
  for (std::size_t i = 0; i < n.p.size(); ++i) {
    if (i) s += ", ";
    s += fmt(n.p[i]);
  }
  return s + ")";
}

// ---------------------------------------------------------------------------
// Parsing: name '(' args ')' where args are numbers or nested regions.

namespace {

class RegionParser {
 public:
  explicit RegionParser(const std::string& text) : s_(text) {}

  Region parse() {
    Region r = region();
    skip_ws();
    if (pos_ != s_.size()) fail("trailing characters");
    return r;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const {
    throw LayoutError("region '" + s_ + "': " + what + " at column " + std::to_string(pos_ + 1));
  }
  void skip_ws() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }
  void expect(char c) {
    skip_ws();
    if (pos_ >= s_.size() || s_[pos_] != c) fail(std::string("expected '") + c + "'");
    ++pos_;
  }
  std::string identifier() {
    skip_ws();
    const std::size_t start = pos_;
    while (pos_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_')) ++pos_;
    if (start == pos_) fail("expected a region name");
    return s_.substr(start, pos_ - start);
  }
  double number() {
    skip_ws();
    double x = 0.0;
    const char* first = s_.data() + pos_;
    const auto [ptr, ec] = std::from_chars(first, s_.data() + s_.size(), x);
    if (ec != std::errc() || !std::isfinite(x)) fail("expected a number");
    pos_ += static_cast<std::size_t>(ptr - first);
    return x;
  }
  std::vector<double> numbers(std::size_t count, const std::string& name) {
    expect('(');
    std::vector<double> v;
    for (std::size_t i = 0; i < count; ++i) {
      if (i) expect(',');
      v.push_back(number());
    }
    skip_ws();
    if (pos_ < s_.size() && s_[pos_] == ',') fail(name + " takes " + std::to_string(count) + " numbers");
    expect(')');
    return v;
  }

  Region region() {
    const std::string name = identifier();
    if (name == "empty") {
      skip_ws();
      if (pos_ < s_.size() && s_[pos_] == '(') {
        expect('(');
        expect(')');
      }
      return Region::empty();
    }
    if (name == "half_plane") {
      const auto v = numbers(3, name);
      return Region::half_plane({v[0], v[1]}, v[2]);
    }
    if (name == "disk") {
      const auto v = numbers(3, name);
      return Region::disk({v[0], v[1]}, v[2]);
    }
    if (name == "annulus") {
      const auto v = numbers(4, name);
      return Region::annulus({v[0], v[1]}, v[2], v[3]);
    }
    if (name == "triangle") {
      const auto v = numbers(6, name);
      return Region::triangle({v[0], v[1]}, {v[2], v[3]}, {v[4], v[5]});
    }
    if (name == "difference") {
      expect('(');
      Region a = region();
      expect(',');
      Region b = region();
      expect(')');
      return Region::difference(a, b);
    }
    fail("unknown region '" + name + "'");
  }

  const std::string& s_;
  std::size_t pos_ = 0;
};

}  // namespace

Region parse_region(const std::string& text) { return RegionParser(text).parse(); }

// ---------------------------------------------------------------------------

double regularized_indicator(double signed_distance, double width) {
  if (!(width > 0.0)) return signed_distance < 0.0 ? 1.0 : 0.0;
  if (std::isinf(signed_distance)) return signed_distance < 0.0 ? 1.0 : 0.0;
  const double t = std::clamp(0.5 - signed_distance / width, 0.0, 1.0);
  return t * t * (3.0 - 2.0 * t);
}

ColorVector DomainLayout::indicator(Vec2 p) const {
  ColorVector v(regions.size());
  for (std::size_t l = 0; l < regions.size(); ++l) {
    v[l] = regularized_indicator(regions[l].signed_distance(p), regularization_width);
  }
  return v;
}

ColorField build_color_field(const PrimalMesh& mesh, const DomainLayout& layout, std::size_t quadrature_order) {
  const std::size_t L = layout.components();
  if (L == 0 || L > kMaxComponents) throw LayoutError("layout needs between 1 and 6 regions");
  const GaussRule rule = gauss_legendre(quadrature_order);
  constexpr double kSlack = 1e-12;
  std::vector<ColorVector> values;
  values.reserve(mesh.num_edges());
  for (std::size_t e = 0; e < mesh.num_edges(); ++e) {
    const Edge& edge = mesh.edge(e);
    const Vec2 a = mesh.vertex(edge.vertices[0]);
    const Vec2 b = mesh.vertex(edge.vertices[1]);
    const Vec2 mid = (a + b) * 0.5;
    const Vec2 half = (b - a) * 0.5;
    ColorVector v(L);
    for (std::size_t q = 0; q < rule.nodes.size(); ++q) {
      const ColorVector s = layout.indicator(mid + half * rule.nodes[q]);
      for (std::size_t l = 0; l < L; ++l) v[l] += 0.5 * rule.weights[q] * s[l];
    }
    for (std::size_t l = 0; l < L; ++l) {
      if (!(v[l] >= -kSlack && v[l] <= 1.0 + kSlack)) {
        throw LayoutError("color component " + std::to_string(l + 1) + " of edge " + std::to_string(e) +
                          " is outside [0, 1]: " + fmt(v[l]));
      }
      v[l] = std::clamp(v[l], 0.0, 1.0);
    }
    const double total = v.total();
    if (total > 1.0 + kSlack) {
      throw LayoutError("color vector of edge " + std::to_string(e) + " leaves the simplex (sum " + fmt(total) +
                        "); regions overlap");
    }
    if (total > 1.0) {
      for (std::size_t l = 0; l < L; ++l) v[l] /= total;
      // Division can still land one ulp above 1; shave the largest entry.
      if (v.total() > 1.0) {
        std::size_t big = 0;
        for (std::size_t l = 1; l < L; ++l) {
          if (v[l] > v[big]) big = l;
        }
        v[big] -= v.total() - 1.0;
      }
    }
    values.push_back(v);
  }
  return ColorField(L, std::move(values));
}

ColorField uniform_color_field(const PrimalMesh& mesh, const ColorVector& v) {
  if (!v.in_simplex()) throw LayoutError("uniform color vector is outside the simplex");
  return ColorField(v.size(), std::vector<ColorVector>(mesh.num_edges(), v));
}

std::vector<ColorVector> cell_colors(const PrimalMesh& mesh, const DualGeometry& dual, const ColorField& color) {
  std::vector<ColorVector> out;
  out.reserve(mesh.num_cells());
  for (std::size_t k = 0; k < mesh.num_cells(); ++k) {
    ColorVector v(color.components());
    const std::size_t off = mesh.subcell_offset(k);
    const auto edges = mesh.cell_edges(k);
    for (std::size_t j = 0; j < edges.size(); ++j) {
      const ColorVector& ve = color[edges[j].edge];
      for (std::size_t l = 0; l < v.size(); ++l) v[l] += dual.alpha(off + j) * ve[l];
    }
    out.push_back(v);
  }
  return out;
}

}  // namespace wbfv
