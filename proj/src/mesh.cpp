#include "wbfv/mesh.hpp"

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <unordered_map>

#include "wbfv/error.hpp"

namespace wbfv {

namespace {

std::string cell_label(std::size_t cell) { return "cell " + std::to_string(cell); }

bool is_simple(std::span<const Vec2> loop) {
  const std::size_t n = loop.size();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (loop[i] == loop[j]) return false;
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const bool adjacent = (j == i + 1) || (i == 0 && j == n - 1);
      if (adjacent) continue;
      if (segments_intersect(loop[i], loop[(i + 1) % n], loop[j], loop[(j + 1) % n])) return false;
    }
  }
  return true;
}

}  // namespace

PrimalMesh::PrimalMesh(std::vector<Vec2> vertices, const std::vector<std::vector<std::size_t>>& cells)
    : vertices_(std::move(vertices)) {
  if (cells.empty()) throw MeshError("mesh has no cells");
  offsets_.reserve(cells.size() + 1);
  offsets_.push_back(0);
  for (std::size_t k = 0; k < cells.size(); ++k) {
    const auto& loop = cells[k];
    if (loop.size() < 3) throw MeshError(cell_label(k) + " has fewer than 3 vertices");
    for (std::size_t v : loop) {
      if (v >= vertices_.size()) {
        throw MeshError(cell_label(k) + " references missing vertex " + std::to_string(v));
      }
      cell_vertices_.push_back(v);
    }
    offsets_.push_back(cell_vertices_.size());
  }

  const std::size_t ncells = cells.size();
  areas_.resize(ncells);
  perimeters_.resize(ncells);
  centroids_.resize(ncells);
  cell_edges_.resize(cell_vertices_.size());
  edge_subcells_.reserve(cell_vertices_.size());
  edges_.reserve(cell_vertices_.size());

  std::unordered_map<std::uint64_t, std::size_t> edge_index;
  edge_index.reserve(cell_vertices_.size());
  const auto key = [this](std::size_t a, std::size_t b) {
    return static_cast<std::uint64_t>(std::min(a, b)) * vertices_.size() + std::max(a, b);
  };

  for (std::size_t k = 0; k < ncells; ++k) {
    const std::vector<Vec2> loop = cell_loop(k);
    const double a = signed_area(loop);
    if (a < 0.0) throw MeshError("negative area cell " + std::to_string(k));
    if (a == 0.0) throw MeshError("zero area cell " + std::to_string(k));
    if (!is_simple(loop)) throw MeshError(cell_label(k) + " is not a simple polygon");
    areas_[k] = a;
    centroids_[k] = polygon_centroid(loop);

    const auto ids = cell_vertices(k);
    const std::size_t n = ids.size();
    for (std::size_t j = 0; j < n; ++j) {
      const std::size_t va = ids[j];
      const std::size_t vb = ids[(j + 1) % n];
      const std::size_t s = offsets_[k] + j;
      const auto [it, inserted] = edge_index.try_emplace(key(va, vb), edges_.size());
      if (inserted) {
        Edge e;
        e.vertices = {va, vb};
        e.left = k;
        const Vec2 d = vertices_[vb] - vertices_[va];
        e.length = norm(d);
        e.normal = Vec2{d.y, -d.x} / e.length;
        edges_.push_back(e);
        edge_subcells_.push_back({s, kBoundary});
        cell_edges_[s] = {it->second, 1.0};
      } else {
        Edge& e = edges_[it->second];
        if (e.right != kBoundary) {
          throw MeshError("edge (" + std::to_string(va) + "," + std::to_string(vb) +
                          ") shared by more than two cells at " + cell_label(k));
        }
        if (e.vertices[0] != vb || e.vertices[1] != va) {
          throw MeshError("inconsistent orientation between cell " + std::to_string(e.left) + " and " +
                          cell_label(k));
        }
        if (e.left == k) throw MeshError(cell_label(k) + " uses an edge twice");
        e.right = k;
        edge_subcells_[it->second][1] = s;
        cell_edges_[s] = {it->second, -1.0};
      }
    }
  }

  bbox_ = {vertices_[cell_vertices_[0]].x, vertices_[cell_vertices_[0]].y, vertices_[cell_vertices_[0]].x,
           vertices_[cell_vertices_[0]].y};
  for (std::size_t v : cell_vertices_) {
    const Vec2 p = vertices_[v];
    bbox_.xmin = std::min(bbox_.xmin, p.x);
    bbox_.ymin = std::min(bbox_.ymin, p.y);
    bbox_.xmax = std::max(bbox_.xmax, p.x);
    bbox_.ymax = std::max(bbox_.ymax, p.y);
  }
  for (const Edge& e : edges_) max_edge_ = std::max(max_edge_, e.length);

  for (std::size_t k = 0; k < ncells; ++k) {
    double p = 0.0;
    Vec2 closure;
    for (const CellEdge& ce : cell_edges(k)) {
      const Edge& e = edges_[ce.edge];
      p += e.length;
      closure += e.normal * (ce.sign * e.length);
    }
    perimeters_[k] = p;
    h_ = std::max(h_, p);
    // The outward normals of a closed polygon, weighted by length, sum to zero.
    if (norm(closure) > 1e-12 * p) {
      throw MeshError(cell_label(k) + " fails the closed-polygon normal identity");
    }
  }
}

std::vector<Vec2> PrimalMesh::cell_loop(std::size_t cell) const {
  std::vector<Vec2> loop;
  loop.reserve(num_cell_edges(cell));
  for (std::size_t v : cell_vertices(cell)) loop.push_back(vertices_[v]);
  return loop;
}

PrimalMesh build_cartesian_mesh(std::size_t nx, std::size_t ny, const BoundingBox& bbox) {
  if (nx < 1 || ny < 1) throw MeshError("cartesian mesh needs at least one cell per direction");
  if (!(bbox.xmax > bbox.xmin) || !(bbox.ymax > bbox.ymin)) {
    throw MeshError("degenerate bounding box");
  }
  std::vector<Vec2> vertices;
  vertices.reserve((nx + 1) * (ny + 1));
  for (std::size_t j = 0; j <= ny; ++j) {
    // Interpolate from both ends so the last row lands exactly on the box.
    const double ty = static_cast<double>(j) / static_cast<double>(ny);
    const double y = j == ny ? bbox.ymax : bbox.ymin + ty * (bbox.ymax - bbox.ymin);
    for (std::size_t i = 0; i <= nx; ++i) {
      const double tx = static_cast<double>(i) / static_cast<double>(nx);
      const double x = i == nx ? bbox.xmax : bbox.xmin + tx * (bbox.xmax - bbox.xmin);
      vertices.push_back({x, y});
    }
  }
  const auto vid = [nx](std::size_t i, std::size_t j) { return j * (nx + 1) + i; };
  std::vector<std::vector<std::size_t>> cells;
  cells.reserve(nx * ny);
  for (std::size_t j = 0; j < ny; ++j) {
    for (std::size_t i = 0; i < nx; ++i) {
      cells.push_back({vid(i, j), vid(i + 1, j), vid(i + 1, j + 1), vid(i, j + 1)});
    }
  }
  return PrimalMesh(std::move(vertices), cells);
}

PrimalMesh parse_mesh(std::istream& in) {
  std::size_t line_no = 0;
  std::string line;
  const auto next_line = [&](const char* expecting) -> std::istringstream {
    while (std::getline(in, line)) {
      ++line_no;
      const auto hash = line.find('#');
      if (hash != std::string::npos) line.erase(hash);
      if (line.find_first_not_of(" \t\r") != std::string::npos) return std::istringstream(line);
    }
    throw MeshError("line " + std::to_string(line_no + 1) + ": unexpected end of file, expected " + expecting);
  };
  const auto fail = [&](const std::string& what) {
    throw MeshError("line " + std::to_string(line_no) + ": " + what);
  };
  const auto expect_end = [&](std::istringstream& ss) {
    std::string extra;
    if (ss >> extra) fail("unexpected token '" + extra + "'");
  };

  {
    auto ss = next_line("header");
    std::string a, b;
    ss >> a >> b;
    if (a != "polymesh" || b != "2d") fail("expected header 'polymesh 2d'");
    expect_end(ss);
  }
  std::size_t nv = 0;
  {
    auto ss = next_line("'vertices N'");
    std::string tag;
    if (!(ss >> tag >> nv) || tag != "vertices") fail("expected 'vertices N'");
    expect_end(ss);
  }
  std::vector<Vec2> vertices(nv);
  for (auto& v : vertices) {
    auto ss = next_line("vertex coordinates");
    if (!(ss >> v.x >> v.y)) fail("expected 'x y'");
    expect_end(ss);
  }
  std::size_t nc = 0;
  {
    auto ss = next_line("'cells M'");
    std::string tag;
    if (!(ss >> tag >> nc) || tag != "cells") fail("expected 'cells M'");
    expect_end(ss);
  }
  std::vector<std::vector<std::size_t>> cells(nc);
  for (auto& cell : cells) {
    auto ss = next_line("cell record");
    std::size_t k = 0;
    if (!(ss >> k)) fail("expected vertex count");
    cell.resize(k);
    for (auto& id : cell) {
      if (!(ss >> id)) fail("expected " + std::to_string(k) + " vertex indices");
    }
    expect_end(ss);
  }
  {
    std::string rest;
    while (std::getline(in, line)) {
      ++line_no;
      const auto hash = line.find('#');
      if (hash != std::string::npos) line.erase(hash);
      if (line.find_first_not_of(" \t\r") != std::string::npos) fail("trailing content after cells");
    }
  }
  return PrimalMesh(std::move(vertices), cells);
}

PrimalMesh load_mesh(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw MeshError("cannot open mesh file " + path.string());
  return parse_mesh(in);
}

std::string format_mesh(const PrimalMesh& mesh) {
  std::string out = "polymesh 2d\nvertices " + std::to_string(mesh.num_vertices()) + "\n";
  char buf[64];
  for (const Vec2& v : mesh.vertices()) {
    std::snprintf(buf, sizeof buf, "%.17g %.17g\n", v.x, v.y);
    out += buf;
  }
  out += "cells " + std::to_string(mesh.num_cells()) + "\n";
  for (std::size_t k = 0; k < mesh.num_cells(); ++k) {
    const auto ids = mesh.cell_vertices(k);
    out += std::to_string(ids.size());
    for (std::size_t id : ids) out += " " + std::to_string(id);
    out += "\n";
  }
  return out;
}

// ---------------------------------------------------------------------------

DualGeometry derive_dual(const PrimalMesh& mesh, const BetaSpec& beta) {
  const std::size_t ncells = mesh.num_cells();
  if (beta.rule == BetaRule::kExplicit && beta.weights.size() != ncells) {
    throw MeshError("explicit beta weights must list one weight vector per cell");
  }
  std::vector<Vec2> nodes(ncells);
  std::vector<double> areas(mesh.num_subcells());
  std::vector<double> alphas(mesh.num_subcells());

  for (std::size_t k = 0; k < ncells; ++k) {
    const std::vector<Vec2> loop = mesh.cell_loop(k);
    const std::size_t n = loop.size();
    Vec2 node;
    switch (beta.rule) {
      case BetaRule::kCentroid:
        node = mesh.centroid(k);
        break;
      case BetaRule::kUniformVertexWeights:
        for (const Vec2& p : loop) node += p;
        node = node / static_cast<double>(n);
        break;
      case BetaRule::kExplicit: {
        const auto& w = beta.weights[k];
        if (w.size() != n) throw MeshError("explicit beta weights size mismatch at cell " + std::to_string(k));
        double sum = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
          if (!(w[i] > 0.0 && w[i] < 1.0)) {
            throw MeshError("explicit beta weights must lie in (0,1) at cell " + std::to_string(k));
          }
          sum += w[i];
          node += loop[i] * w[i];
        }
        if (std::abs(sum - 1.0) > 1e-12) {
          throw MeshError("explicit beta weights must sum to 1 at cell " + std::to_string(k));
        }
        break;
      }
    }
    nodes[k] = node;

    const std::size_t off = mesh.subcell_offset(k);
    for (std::size_t j = 0; j < n; ++j) {
      const double a = 0.5 * orient(node, loop[j], loop[(j + 1) % n]);
      if (!(a > 0.0)) {
        throw MeshError("internal node of cell " + std::to_string(k) +
                        " does not see every edge from inside the cell; use the centroid rule");
      }
      areas[off + j] = a;
      alphas[off + j] = a / mesh.area(k);
    }
  }

  std::vector<double> dual_areas(mesh.num_edges());
  for (std::size_t e = 0; e < mesh.num_edges(); ++e) {
    const auto [sl, sr] = mesh.edge_subcells(e);
    dual_areas[e] = areas[sl] + (sr == kBoundary ? 0.0 : areas[sr]);
  }
  return DualGeometry(std::move(nodes), std::move(areas), std::move(alphas), std::move(dual_areas));
}

MeshQualityReport validate_mesh(const PrimalMesh& mesh, const DualGeometry& dual,
                                const QualityThresholds& thresholds) {
  MeshQualityReport r;
  r.thresholds = thresholds;
  const double h = mesh.h();
  r.min_edge_ratio = std::numeric_limits<double>::infinity();
  r.min_dual_ratio = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < mesh.num_cells(); ++k) {
    r.max_shape_ratio = std::max(r.max_shape_ratio, mesh.size(k) * mesh.perimeter(k) / mesh.area(k));
  }
  for (const Edge& e : mesh.edges()) {
    r.min_edge_ratio = std::min(r.min_edge_ratio, e.length / h);
    r.max_edge_ratio = std::max(r.max_edge_ratio, e.length / h);
  }
  for (std::size_t s = 0; s < mesh.num_subcells(); ++s) {
    r.min_dual_ratio = std::min(r.min_dual_ratio, dual.subcell_area(s) / (h * h));
  }
  r.shape_ok = r.max_shape_ratio <= thresholds.c_shape;
  r.edge_ok = r.min_edge_ratio >= thresholds.c_edge_min && r.max_edge_ratio <= thresholds.c_edge_max;
  r.dual_ok = r.min_dual_ratio >= thresholds.c_dual;
  return r;
}

}  // namespace wbfv
