#pragma once

#include <array>
#include <cstddef>
#include <filesystem>
#include <istream>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "wbfv/geometry.hpp"

namespace wbfv {

inline constexpr std::size_t kBoundary = std::numeric_limits<std::size_t>::max();

/// An edge of the primal mesh. `normal` is the unit normal pointing from the
/// left cell towards the right cell (outward of the domain on boundary edges).
struct Edge {
  std::array<std::size_t, 2> vertices{};
  std::size_t left = kBoundary;
  std::size_t right = kBoundary;
  double length = 0.0;
  Vec2 normal;

  bool is_boundary() const { return right == kBoundary; }
};

/// One entry of a cell's edge loop, in the cell's counter-clockwise order.
struct CellEdge {
  std::size_t edge = 0;
  /// +1 when the cell is the edge's left cell, -1 otherwise; the cell's
  /// outward normal on this edge is `sign * edge.normal`.
  double sign = 1.0;
};

struct BoundingBox {
  double xmin = 0.0;
  double ymin = 0.0;
  double xmax = 0.0;
  double ymax = 0.0;

  double width() const { return xmax - xmin; }
  double height() const { return ymax - ymin; }
  bool contains(Vec2 p) const { return p.x >= xmin && p.x <= xmax && p.y >= ymin && p.y <= ymax; }
  bool operator==(const BoundingBox&) const = default;
};

/// Polygonal primal mesh in two space dimensions.
///
/// Cells are counter-clockwise vertex loops. Edges and adjacency are derived
/// at construction and every geometric invariant is checked there, so a
/// constructed mesh is always valid. Immutable afterwards.
///
/// Per-(cell, edge) quantities ("subcells") are stored in CSR order:
/// subcell `subcell_offset(K) + j` is the j-th edge of cell K.
class PrimalMesh {
 public:
  static constexpr int kDimension = 2;

  PrimalMesh(std::vector<Vec2> vertices, const std::vector<std::vector<std::size_t>>& cells);

  std::size_t num_vertices() const { return vertices_.size(); }
  std::size_t num_cells() const { return offsets_.size() - 1; }
  std::size_t num_edges() const { return edges_.size(); }
  std::size_t num_subcells() const { return offsets_.back(); }

  std::span<const Vec2> vertices() const { return vertices_; }
  Vec2 vertex(std::size_t i) const { return vertices_[i]; }

  std::size_t subcell_offset(std::size_t cell) const { return offsets_[cell]; }
  std::size_t num_cell_edges(std::size_t cell) const { return offsets_[cell + 1] - offsets_[cell]; }
  std::span<const std::size_t> cell_vertices(std::size_t cell) const {
    return {cell_vertices_.data() + offsets_[cell], num_cell_edges(cell)};
  }
  std::span<const CellEdge> cell_edges(std::size_t cell) const {
    return {cell_edges_.data() + offsets_[cell], num_cell_edges(cell)};
  }

  const Edge& edge(std::size_t e) const { return edges_[e]; }
  std::span<const Edge> edges() const { return edges_; }

  /// Subcell indices of an edge on its left and right cell (right is
  /// kBoundary on boundary edges).
  std::array<std::size_t, 2> edge_subcells(std::size_t e) const { return edge_subcells_[e]; }

  /// Outward unit normal of `cell` on its `local`-th edge.
  Vec2 outward_normal(std::size_t cell, std::size_t local) const {
    const CellEdge& ce = cell_edges_[offsets_[cell] + local];
    return edges_[ce.edge].normal * ce.sign;
  }
  /// Cell across the `local`-th edge of `cell`, or kBoundary.
  std::size_t neighbor(std::size_t cell, std::size_t local) const {
    const Edge& e = edges_[cell_edges_[offsets_[cell] + local].edge];
    return e.left == cell ? e.right : e.left;
  }

  double area(std::size_t cell) const { return areas_[cell]; }
  double perimeter(std::size_t cell) const { return perimeters_[cell]; }
  /// Exterior perimeter h_K used as the cell's characteristic size.
  double size(std::size_t cell) const { return perimeters_[cell]; }
  /// Global mesh size h = max over cells of h_K.
  double h() const { return h_; }
  /// Longest edge; the "mesh width" unit for regularization lengths.
  double max_edge_length() const { return max_edge_; }
  Vec2 centroid(std::size_t cell) const { return centroids_[cell]; }
  BoundingBox bounding_box() const { return bbox_; }

  std::vector<Vec2> cell_loop(std::size_t cell) const;

 private:
  std::vector<Vec2> vertices_;
  std::vector<std::size_t> offsets_;
  std::vector<std::size_t> cell_vertices_;
  std::vector<CellEdge> cell_edges_;
  std::vector<Edge> edges_;
  std::vector<std::array<std::size_t, 2>> edge_subcells_;
  std::vector<double> areas_;
  std::vector<double> perimeters_;
  std::vector<Vec2> centroids_;
  BoundingBox bbox_;
  double h_ = 0.0;
  double max_edge_ = 0.0;
};

/// Axis-aligned nx-by-ny quadrilateral mesh, cells numbered row-major from
/// the lower-left corner.
PrimalMesh build_cartesian_mesh(std::size_t nx, std::size_t ny, const BoundingBox& bbox);

/// Parse the line-oriented "polymesh 2d" text format.
PrimalMesh parse_mesh(std::istream& in);
PrimalMesh load_mesh(const std::filesystem::path& path);
/// Inverse of parse_mesh, with 17 significant digits.
std::string format_mesh(const PrimalMesh& mesh);

// ---------------------------------------------------------------------------
// Dual geometry

enum class BetaRule {
  /// Area centroid of the polygon.
  kCentroid,
  /// Arithmetic mean of the vertices.
  kUniformVertexWeights,
  /// Caller-supplied convex vertex weights per cell.
  kExplicit,
};

struct BetaSpec {
  BetaRule rule = BetaRule::kCentroid;
  /// Used only with kExplicit: one weight list per cell, matching the cell's
  /// vertex loop, positive and summing to one.
  std::vector<std::vector<double>> weights;
};

/// Internal nodes x_K and the subcell fans E(x_K, e) of every cell.
class DualGeometry {
 public:
  DualGeometry(std::vector<Vec2> nodes, std::vector<double> subcell_areas, std::vector<double> alphas,
               std::vector<double> dual_cell_areas)
      : nodes_(std::move(nodes)),
        subcell_areas_(std::move(subcell_areas)),
        alphas_(std::move(alphas)),
        dual_cell_areas_(std::move(dual_cell_areas)) {}

  Vec2 internal_node(std::size_t cell) const { return nodes_[cell]; }
  /// |E(x_K, e)| for subcell index s.
  double subcell_area(std::size_t s) const { return subcell_areas_[s]; }
  /// Volume fraction alpha_{K,e} = |E(x_K, e)| / |K|.
  double alpha(std::size_t s) const { return alphas_[s]; }
  std::span<const double> alphas() const { return alphas_; }
  /// |K*(e)|, the sum of the two subcells adjacent to e (one on the boundary).
  double dual_cell_area(std::size_t e) const { return dual_cell_areas_[e]; }

 private:
  std::vector<Vec2> nodes_;
  std::vector<double> subcell_areas_;
  std::vector<double> alphas_;
  std::vector<double> dual_cell_areas_;
};

DualGeometry derive_dual(const PrimalMesh& mesh, const BetaSpec& beta = {});

struct QualityThresholds {
  double c_shape = 100.0;        // C:  sup h_K p_K / |K| <= C
  double c_edge_min = 1e-3;      // C1: C1 <= |e| / h
  double c_edge_max = 10.0;      // C2: |e| / h <= C2
  double c_dual = 1e-4;          // c:  c h^2 <= |E(x_K, e)|
};

struct MeshQualityReport {
  double max_shape_ratio = 0.0;  // max h_K p_K / |K|
  double min_edge_ratio = 0.0;   // min |e| / h
  double max_edge_ratio = 0.0;   // max |e| / h
  double min_dual_ratio = 0.0;   // min |E(x_K, e)| / h^2
  bool shape_ok = false;
  bool edge_ok = false;
  bool dual_ok = false;
  QualityThresholds thresholds;

  bool pass() const { return shape_ok && edge_ok && dual_ok; }
};

MeshQualityReport validate_mesh(const PrimalMesh& mesh, const DualGeometry& dual,
                                const QualityThresholds& thresholds = {});

}  // namespace wbfv
