#include "wbfv/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "wbfv/error.hpp"
#include "wbfv/quadrature.hpp"

namespace wbfv {

inline double max_abs(Vec2 v) { return std::max(std::abs(v.x), std::abs(v.y)); }

Entropy Entropy::quadratic() {
  return {[](double w) { return 0.5 * w * w; }, [](double w) { return w; }, [](double) { return 1.0; }, "quadratic"};
}

Vec2 entropy_flux(const CouplingModel& model, const Entropy& entropy, double u, const ColorVector& v, double tol) {
  const auto integrand = [&](double t) {
    const CouplingSample s = model.sample(t, v);
    return s.dc * entropy.dU(s.c0);
  };
  return adaptive_simpson<Vec2>(integrand, 0.0, u, tol);
}

std::vector<double> entropy_residuals(const WellBalancedScheme& scheme, const StepRecord& rec, const Entropy& entropy,
                                      EntropyFluxCache* cache) {
  const PrimalMesh& mesh = scheme.mesh();
  const DualGeometry& dual = scheme.dual();
  const ColorField& color = scheme.color();
  const CouplingModel& model = scheme.model();
  const FluxKind kind = scheme.options().flux;

  // Entropy flux of every subcell state along its edge's own normal.
  EntropyFluxCache local;
  EntropyFluxCache& c = cache ? *cache : local;
  const bool fresh = c.u.size() != mesh.num_cells();
  if (fresh) {
    c.u.assign(mesh.num_cells(), 0.0);
    c.q.assign(mesh.num_subcells(), 0.0);
  }
  std::vector<double>& q = c.q;
  for (std::size_t k = 0; k < mesh.num_cells(); ++k) {
    if (!fresh && c.u[k] == rec.u_prev[k]) continue;
    c.u[k] = rec.u_prev[k];
    const std::size_t off = mesh.subcell_offset(k);
    const auto edges = mesh.cell_edges(k);
    for (std::size_t j = 0; j < edges.size(); ++j) {
      const std::size_t e = edges[j].edge;
      q[off + j] = dot(entropy_flux(model, entropy, rec.u_prev[k], color[e]), mesh.edge(e).normal);
    }
  }

  std::vector<double> G(mesh.num_edges());
  for (std::size_t e = 0; e < mesh.num_edges(); ++e) {
    const auto [sl, sr] = mesh.edge_subcells(e);
    const std::size_t r = sr == kBoundary ? sl : sr;
    if (kind == FluxKind::kRusanov) {
      G[e] = 0.5 * (q[sl] + q[r]) - 0.5 * rec.edge_lambda[e] * (entropy.U(rec.w_sub[r]) - entropy.U(rec.w_sub[sl]));
    } else {
      const double ustar = rec.edge_u_star[e];
      const std::size_t kl = mesh.edge(e).left;
      if (ustar == rec.u_prev[kl]) {
        G[e] = q[sl];
      } else if (sr != kBoundary && ustar == rec.u_prev[mesh.edge(e).right]) {
        G[e] = q[sr];
      } else {
        G[e] = dot(entropy_flux(model, entropy, ustar, color[e]), mesh.edge(e).normal);
      }
    }
  }

  std::vector<double> res(mesh.num_subcells());
  for (std::size_t k = 0; k < mesh.num_cells(); ++k) {
    const std::size_t off = mesh.subcell_offset(k);
    const auto edges = mesh.cell_edges(k);
    for (std::size_t j = 0; j < edges.size(); ++j) {
      const std::size_t s = off + j;
      const CellEdge& ce = edges[j];
      const double mu = rec.tau * mesh.edge(ce.edge).length / (dual.alpha(s) * mesh.area(k));
      res[s] = entropy.U(rec.w_sub_minus[s]) - entropy.U(rec.w_sub[s]) + mu * (ce.sign * G[ce.edge] - ce.sign * q[s]);
    }
  }
  return res;
}

double max_principle_margin(const PrimalMesh& mesh, const StepRecord& rec) {
  double worst = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < mesh.num_cells(); ++k) {
    double lo = rec.u_prev[k];
    double hi = rec.u_prev[k];
    const std::size_t off = mesh.subcell_offset(k);
    for (std::size_t j = 0; j < mesh.num_cell_edges(k); ++j) {
      lo = std::min(lo, rec.u_across[off + j]);
      hi = std::max(hi, rec.u_across[off + j]);
    }
    worst = std::min({worst, hi - rec.u_next[k], rec.u_next[k] - lo});
  }
  return worst;
}

double oscillation_increment(const PrimalMesh& mesh, const DualGeometry& dual, const StepRecord& rec) {
  double total = 0.0;
  for (std::size_t k = 0; k < mesh.num_cells(); ++k) {
    const std::size_t off = mesh.subcell_offset(k);
    double cell = 0.0;
    for (std::size_t j = 0; j < mesh.num_cell_edges(k); ++j) {
      const double d = rec.w_cell_next[k] - rec.w_sub_minus[off + j];
      cell += dual.alpha(off + j) * d * d;
    }
    total += cell * mesh.area(k);
  }
  return total;
}

double local_cfl(const PrimalMesh& mesh, const DualGeometry& dual, const StepRecord& rec) {
  double worst = 0.0;
  for (std::size_t k = 0; k < mesh.num_cells(); ++k) {
    const std::size_t off = mesh.subcell_offset(k);
    const auto edges = mesh.cell_edges(k);
    for (std::size_t j = 0; j < edges.size(); ++j) {
      const std::size_t s = off + j;
      const double dw = rec.w_across[s] - rec.w_sub[s];
      if (std::abs(dw) <= 1e-12) continue;
      const double mu = rec.tau * mesh.edge(edges[j].edge).length / (dual.alpha(s) * mesh.area(k));
      worst = std::max(worst, std::abs(rec.g_sub[s] - rec.phi_sub[s]) / std::abs(dw) * mu);
    }
  }
  return worst;
}

void DiagnosticsMonitor::observe(const StepRecord& rec, double t_next) {
  const PrimalMesh& mesh = scheme_.mesh();
  DiagnosticsRow row;
  row.t = t_next;
  row.tau = rec.tau;
  row.max_principle_margin = max_principle_margin(mesh, rec);
  const std::vector<double> res = entropy_residuals(scheme_, rec, entropy_, &cache_);
  row.entropy_residual_max = res.empty() ? 0.0 : *std::max_element(res.begin(), res.end());
  row.oscillation_increment = oscillation_increment(mesh, scheme_.dual(), rec);
  row.oscillation_sum = (log_.rows.empty() ? 0.0 : log_.rows.back().oscillation_sum) + row.oscillation_increment;
  row.local_cfl = local_cfl(mesh, scheme_.dual(), rec);
  if (u_star_) {
    double drift = 0.0;
    for (double u : rec.u_next) drift = std::max(drift, std::abs(u - *u_star_));
    row.well_balanced_drift = drift;
  }
  for (const auto* field : {&rec.w_sub, &rec.w_sub_minus}) {
    for (double w : *field) {
      log_.w_min = std::min(log_.w_min, w);
      log_.w_max = std::max(log_.w_max, w);
    }
  }
  double sigma = std::numeric_limits<double>::infinity();
  for (int i = 0; i <= 64; ++i) sigma = std::min(sigma, entropy_.d2U(log_.w_min + (log_.w_max - log_.w_min) * i / 64.0));
  log_.sigma_U = sigma;
  log_.rows.push_back(row);
}

void DiagnosticsLog::write_csv(std::ostream& out) const {
  out << "t,tau,max_principle_margin,entropy_residual_max,oscillation_increment,oscillation_sum\n";
  char buf[256];
  for (const DiagnosticsRow& r : rows) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n", r.t, r.tau, r.max_principle_margin,
                  r.entropy_residual_max, r.oscillation_increment, r.oscillation_sum);
    out << buf;
  }
}

double oscillation_sum(const DiagnosticsLog& log) { return log.rows.empty() ? 0.0 : log.rows.back().oscillation_sum; }

double check_max_principle(const DiagnosticsLog& log) {
  double worst = std::numeric_limits<double>::infinity();
  for (const DiagnosticsRow& r : log.rows) worst = std::min(worst, r.max_principle_margin);
  return worst;
}

double check_well_balanced(const std::vector<Snapshot>& snapshots, double u_star) {
  if (snapshots.empty()) throw MeasurementError("no snapshots to check");
  const std::vector<double>& u0 = snapshots.front().u;
  if (std::any_of(u0.begin(), u0.end(), [&](double u) { return u != u0.front(); })) {
    throw MeasurementError("well-balanced check needs constant initial data");
  }
  double drift = 0.0;
  for (const Snapshot& s : snapshots) {
    for (double u : s.u) drift = std::max(drift, std::abs(u - u_star));
  }
  return drift;
}

FrontMeasurement front_speed(const PrimalMesh& mesh, const std::vector<Snapshot>& snapshots, double threshold,
                             Vec2 direction, const BoundingBox& window, const std::vector<bool>& cells) {
  if (!cells.empty() && cells.size() != mesh.num_cells()) throw MeasurementError("cell mask does not match the mesh");
  if (snapshots.size() < 2) throw MeasurementError("front speed needs at least two snapshots");
  const Vec2 dir = direction / norm(direction);
  FrontMeasurement fm;
  for (const Snapshot& snap : snapshots) {
    double acc = 0.0;
    std::size_t count = 0;
    for (const Edge& e : mesh.edges()) {
      if (e.is_boundary()) continue;
      const Vec2 cl = mesh.centroid(e.left);
      const Vec2 cr = mesh.centroid(e.right);
      if (!window.contains(cl) || !window.contains(cr)) continue;
      if (!cells.empty() && (!cells[e.left] || !cells[e.right])) continue;
      const double a = snap.w[e.left] - threshold;
      const double b = snap.w[e.right] - threshold;
      if ((a < 0.0) == (b < 0.0)) continue;
      const Vec2 p = cl + (cr - cl) * (a / (a - b));
      acc += dot(p, dir);
      ++count;
    }
    if (count == 0) {
      char buf[128];
      std::snprintf(buf, sizeof buf, "level set w = %g not found in the window at t = %g", threshold, snap.t);
      throw MeasurementError(buf);
    }
    fm.times.push_back(snap.t);
    fm.positions.push_back(acc / static_cast<double>(count));
  }
  const double n = static_cast<double>(fm.times.size());
  double mt = 0.0;
  double mp = 0.0;
  for (std::size_t i = 0; i < fm.times.size(); ++i) {
    mt += fm.times[i] / n;
    mp += fm.positions[i] / n;
  }
  double num = 0.0;
  double den = 0.0;
  for (std::size_t i = 0; i < fm.times.size(); ++i) {
    num += (fm.times[i] - mt) * (fm.positions[i] - mp);
    den += (fm.times[i] - mt) * (fm.times[i] - mt);
  }
  if (!(den > 0.0)) throw MeasurementError("front speed needs snapshots at distinct times");
  fm.speed = num / den;
  return fm;
}

double rankine_hugoniot_speed(const FluxFamily& flux, double a, double b, Vec2 nu) {
  return dot(flux.value(a) - flux.value(b), nu) / (a - b);
}

}  // namespace wbfv
