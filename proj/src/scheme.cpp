#include "wbfv/scheme.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "wbfv/error.hpp"

namespace wbfv {

SolverState init_state(const PrimalMesh& mesh, const DualGeometry& dual, const std::function<double(Vec2)>& u0,
                       InitQuadrature quadrature) {
  SolverState s;
  s.u.resize(mesh.num_cells());
  for (std::size_t k = 0; k < mesh.num_cells(); ++k) {
    double value = 0.0;
    if (quadrature == InitQuadrature::kCentroid) {
      value = u0(mesh.centroid(k));
    } else {
      const Vec2 x = dual.internal_node(k);
      const auto ids = mesh.cell_vertices(k);
      const std::size_t n = ids.size();
      const std::size_t off = mesh.subcell_offset(k);
      // Accumulate deviations from u0(x_K) so constant data stays exact.
      const double base = u0(x);
      double acc = 0.0;
      for (std::size_t j = 0; j < n; ++j) {
        const Vec2 a = mesh.vertex(ids[j]);
        const Vec2 b = mesh.vertex(ids[(j + 1) % n]);
        const double tri = (u0((x + a) * 0.5) - base) + (u0((a + b) * 0.5) - base) + (u0((b + x) * 0.5) - base);
        acc += dual.alpha(off + j) * tri / 3.0;
      }
      value = base + acc;
    }
    if (!std::isfinite(value)) throw Error("non-finite initial value in cell " + std::to_string(k));
    s.u[k] = value;
  }
  const auto [lo, hi] = std::minmax_element(s.u.begin(), s.u.end());
  s.m = *lo;
  s.M = *hi;
  return s;
}

Reconstruction reconstruct_subcell(const PrimalMesh& mesh, const DualGeometry& dual, const ColorField& color,
                                   const CouplingModel& model, const std::vector<double>& u) {
  Reconstruction r;
  r.w_sub.resize(mesh.num_subcells());
  r.w_cell.resize(mesh.num_cells());
  for (std::size_t k = 0; k < mesh.num_cells(); ++k) {
    const std::size_t off = mesh.subcell_offset(k);
    const auto edges = mesh.cell_edges(k);
    double wk = 0.0;
    for (std::size_t j = 0; j < edges.size(); ++j) {
      const double w = model.c0(u[k], color[edges[j].edge]);
      r.w_sub[off + j] = w;
      wk += dual.alpha(off + j) * w;
    }
    r.w_cell[k] = wk;
  }
  return r;
}

WellBalancedScheme::WellBalancedScheme(std::shared_ptr<const PrimalMesh> mesh, std::shared_ptr<const DualGeometry> dual,
                                       std::shared_ptr<const ColorField> color,
                                       std::shared_ptr<const CouplingModel> model, SchemeOptions options)
    : mesh_(std::move(mesh)),
      dual_(std::move(dual)),
      color_(std::move(color)),
      model_(std::move(model)),
      options_(options) {
  if (color_->size() != mesh_->num_edges()) throw LayoutError("color field does not match the mesh edges");
  if (color_->components() != model_->components()) {
    throw LayoutError("color field has " + std::to_string(color_->components()) + " components, model expects " +
                      std::to_string(model_->components()));
  }
  pairs_.resize(mesh_->num_subcells());
  for (std::size_t k = 0; k < mesh_->num_cells(); ++k) {
    const std::size_t off = mesh_->subcell_offset(k);
    const auto edges = mesh_->cell_edges(k);
    for (std::size_t j = 0; j < edges.size(); ++j) pairs_[off + j] = {dual_->alpha(off + j), (*color_)[edges[j].edge]};
  }
}

const NumericalFlux& WellBalancedScheme::flux(double m, double M) const {
  if (!flux_ || flux_->kind() != options_.flux || flux_->range_min() != m || flux_->range_max() != M) {
    flux_ = std::make_unique<NumericalFlux>(model_, options_.flux, m, M);
  }
  return *flux_;
}

const std::vector<double>& WellBalancedScheme::wave_speeds(double m, double M) const {
  const std::array<double, 4> key{m, M, static_cast<double>(options_.wave_speed_samples), options_.wave_speed_safety};
  if (speeds_.empty() || key != speeds_key_) {
    speeds_.resize(mesh_->num_edges());
    for (std::size_t e = 0; e < mesh_->num_edges(); ++e) {
      speeds_[e] = wave_speed_bound(*model_, (*color_)[e], mesh_->edge(e).normal, m, M, options_.wave_speed_samples,
                                    options_.wave_speed_safety);
    }
    speeds_key_ = key;
  }
  return speeds_;
}

const std::vector<double>& WellBalancedScheme::guard_bounds(double m, double M) const {
  const std::array<double, 2> key{m, M};
  if (bounds_.empty() || key != bounds_key_) {
    bounds_.resize(2 * mesh_->num_subcells());
    for (std::size_t s = 0; s < pairs_.size(); ++s) {
      bounds_[2 * s] = model_->c0(m, pairs_[s].v) - 1e-9;
      bounds_[2 * s + 1] = model_->c0(M, pairs_[s].v) + 1e-9;
    }
    bounds_key_ = key;
  }
  return bounds_;
}

double WellBalancedScheme::compute_dt(const SolverState& state) const {
  if (!(options_.cfl > 0.0 && options_.cfl <= 1.0)) throw ConfigError("cfl_number out of (0,1]");
  const std::vector<double>& speeds = wave_speeds(state.m, state.M);
  const PrimalMesh& mesh = *mesh_;
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < mesh.num_cells(); ++k) {
    const std::size_t off = mesh.subcell_offset(k);
    const auto edges = mesh.cell_edges(k);
    for (std::size_t j = 0; j < edges.size(); ++j) {
      const std::size_t e = edges[j].edge;
      if (speeds[e] > 0.0) {
        best = std::min(best, dual_->alpha(off + j) * mesh.area(k) / (mesh.edge(e).length * speeds[e]));
      }
    }
  }
  return std::min(options_.cfl * best, options_.max_dt);
}

SolverState WellBalancedScheme::step(const SolverState& state, double tau, StepRecord* record) const {
  const PrimalMesh& mesh = *mesh_;
  const DualGeometry& dual = *dual_;
  const ColorField& color = *color_;
  const std::size_t ncells = mesh.num_cells();
  const std::size_t nsub = mesh.num_subcells();
  const std::size_t nedges = mesh.num_edges();
  if (state.u.size() != ncells) throw Error("state size does not match the mesh");
  if (!(tau >= 0.0)) throw Error("negative time step");
  const NumericalFlux& g = flux(state.m, state.M);
  const std::vector<double>* bounds = options_.guard ? &guard_bounds(state.m, state.M) : nullptr;

  // Subcell states, with phi taken along the edge's own normal.
  std::vector<FluxSide> sides(nsub);
  for (std::size_t k = 0; k < ncells; ++k) {
    const std::size_t off = mesh.subcell_offset(k);
    const auto edges = mesh.cell_edges(k);
    for (std::size_t j = 0; j < edges.size(); ++j) {
      const std::size_t e = edges[j].edge;
      sides[off + j] = g.side(state.u[k], color[e], mesh.edge(e).normal);
    }
  }

  // One flux evaluation per edge; copy ghost on the boundary.
  std::vector<double> ge(nedges);
  if (record) {
    record->edge_lambda.assign(nedges, 0.0);
    record->edge_u_star.assign(nedges, 0.0);
  }
  for (std::size_t e = 0; e < nedges; ++e) {
    const auto [sl, sr] = mesh.edge_subcells(e);
    const FluxSide& left = sides[sl];
    const FluxSide& right = sr == kBoundary ? left : sides[sr];
    const FluxValue fv = g.evaluate(left, right, color[e], mesh.edge(e).normal);
    ge[e] = fv.value;
    if (record) {
      record->edge_lambda[e] = fv.lambda;
      record->edge_u_star[e] = fv.u_star;
    }
  }

  if (record) {
    record->tau = tau;
    record->u_prev = state.u;
    record->u_next.assign(ncells, 0.0);
    record->w_cell.assign(ncells, 0.0);
    record->w_cell_next.assign(ncells, 0.0);
    record->w_sub.assign(nsub, 0.0);
    record->w_sub_minus.assign(nsub, 0.0);
    record->w_across.assign(nsub, 0.0);
    record->u_across.assign(nsub, 0.0);
    record->g_sub.assign(nsub, 0.0);
    record->phi_sub.assign(nsub, 0.0);
  }

  SolverState next;
  next.t = state.t + tau;
  next.m = state.m;
  next.M = state.M;
  next.u.resize(ncells);
  RootOptions opt;
  opt.tol = options_.tol_root;

  for (std::size_t k = 0; k < ncells; ++k) {
    const std::size_t off = mesh.subcell_offset(k);
    const auto edges = mesh.cell_edges(k);
    const double area = mesh.area(k);
    double sum_g = 0.0;
    double sum_f = 0.0;
    double wk = 0.0;
    for (std::size_t j = 0; j < edges.size(); ++j) {
      const std::size_t s = off + j;
      const CellEdge& ce = edges[j];
      const double len = mesh.edge(ce.edge).length;
      sum_g += ce.sign * ge[ce.edge] * len;
      sum_f += ce.sign * sides[s].phi * len;
      wk += dual.alpha(s) * sides[s].w;
    }
    const double wnext = wk - tau / area * (sum_g - sum_f);

    if (options_.guard || record) {
      for (std::size_t j = 0; j < edges.size(); ++j) {
        const std::size_t s = off + j;
        const CellEdge& ce = edges[j];
        const double len = mesh.edge(ce.edge).length;
        const double gs = ce.sign * ge[ce.edge];
        const double phis = ce.sign * sides[s].phi;
        const double wminus = sides[s].w - len * tau / (dual.alpha(s) * area) * (gs - phis);
        if (options_.guard) {
          const double lo = (*bounds)[2 * s];
          const double hi = (*bounds)[2 * s + 1];
          if (!(wminus >= lo && wminus <= hi)) {
            throw StepError("CFL violation detected in cell " + std::to_string(k) + ": subcell state " +
                                std::to_string(wminus) + " outside [" + std::to_string(lo) + ", " +
                                std::to_string(hi) + "]",
                            k);
          }
        }
        if (record) {
          const auto [sl, sr] = mesh.edge_subcells(ce.edge);
          const std::size_t other = sl == s ? sr : sl;
          const std::size_t nb = mesh.neighbor(k, j);
          record->w_sub[s] = sides[s].w;
          record->w_sub_minus[s] = wminus;
          record->w_across[s] = other == kBoundary ? sides[s].w : sides[other].w;
          record->u_across[s] = nb == kBoundary ? state.u[k] : state.u[nb];
          record->g_sub[s] = gs;
          record->phi_sub[s] = phis;
        }
      }
    }

    opt.guess = state.u[k];
    // wk is summed exactly like the inversion residual, so an unchanged w
    // would return the guess anyway.
    double unext = state.u[k];
    if (wnext != wk) {
      try {
        unext = invert_c0_weighted(*model_, wnext, std::span<const WeightedColor>(pairs_.data() + off, edges.size()), opt);
      } catch (const RootError& e) {
        throw StepError("cell " + std::to_string(k) + ": " + e.what(), k);
      }
    }
    next.u[k] = unext;
    if (record) {
      record->w_cell[k] = wk;
      record->w_cell_next[k] = wnext;
      record->u_next[k] = unext;
    }
  }
  return next;
}

}  // namespace wbfv
