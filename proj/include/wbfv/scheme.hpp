#pragma once

#include <array>
#include <functional>
#include <limits>
#include <memory>
#include <vector>

#include "wbfv/coupling.hpp"
#include "wbfv/flux.hpp"
#include "wbfv/layout.hpp"
#include "wbfv/mesh.hpp"

namespace wbfv {

/// Cell values u_K at time t, with the bounds [m, M] of the initial data.
struct SolverState {
  double t = 0.0;
  std::vector<double> u;
  double m = 0.0;
  double M = 0.0;
};

enum class InitQuadrature {
  /// u_K = u0(centroid)
  kCentroid,
  /// Edge-midpoint rule on every fan triangle (x_K, e); exact for quadratics.
  kSubcellFan,
};

/// Cell averages of u0; m and M are the min and max over cells.
SolverState init_state(const PrimalMesh& mesh, const DualGeometry& dual, const std::function<double(Vec2)>& u0,
                       InitQuadrature quadrature = InitQuadrature::kSubcellFan);

/// w_{K,e} = C_0(u_K, v_e) per subcell and w_K = sum_e alpha_{K,e} w_{K,e}.
struct Reconstruction {
  std::vector<double> w_sub;
  std::vector<double> w_cell;
};

Reconstruction reconstruct_subcell(const PrimalMesh& mesh, const DualGeometry& dual, const ColorField& color,
                                   const CouplingModel& model, const std::vector<double>& u);

/// Everything one step computed, indexed by subcell (CSR order), cell, or edge.
struct StepRecord {
  double tau = 0.0;
  std::vector<double> u_prev;
  std::vector<double> u_next;
  std::vector<double> w_cell;       // w^n_K
  std::vector<double> w_cell_next;  // w^{n+1}_K
  std::vector<double> w_sub;        // w^n_{K,e}
  std::vector<double> w_sub_minus;  // w^{n+1,-}_{K,e}
  std::vector<double> w_across;     // w^n_{K_e,e}; the subcell's own value on boundary edges
  std::vector<double> u_across;     // u^n of the neighbour (own value on boundary edges)
  std::vector<double> g_sub;        // g_{e,K}, outward for the cell
  std::vector<double> phi_sub;      // f(w^n_{K,e}, v_e) . nu_{K,e}
  std::vector<double> edge_lambda;  // Rusanov diffusion per edge
  std::vector<double> edge_u_star;  // Godunov extremizer per edge
};

struct SchemeOptions {
  FluxKind flux = FluxKind::kRusanov;
  double cfl = 0.5;
  double tol_root = 1e-12;
  /// Upper bound on tau when every wave speed vanishes.
  double max_dt = std::numeric_limits<double>::infinity();
  /// Reject steps whose subcell states leave the w-image of [m, M].
  bool guard = true;
  std::size_t wave_speed_samples = 64;
  double wave_speed_safety = 1.05;
};

/// Explicit well-balanced update on a fixed mesh, dual, color field and model.
class WellBalancedScheme {
 public:
  WellBalancedScheme(std::shared_ptr<const PrimalMesh> mesh, std::shared_ptr<const DualGeometry> dual,
                     std::shared_ptr<const ColorField> color, std::shared_ptr<const CouplingModel> model,
                     SchemeOptions options = {});

  const PrimalMesh& mesh() const { return *mesh_; }
  const DualGeometry& dual() const { return *dual_; }
  const ColorField& color() const { return *color_; }
  const CouplingModel& model() const { return *model_; }
  const SchemeOptions& options() const { return options_; }
  SchemeOptions& options() { return options_; }

  /// cfl * min over subcells of alpha |K| / (|e| s_e), s_e the wave speed bound
  /// of edge e over [state.m, state.M].
  double compute_dt(const SolverState& state) const;

  /// Advance by tau. Fills `record` when given.
  SolverState step(const SolverState& state, double tau, StepRecord* record = nullptr) const;

  /// The flux used for a state range; cached.
  const NumericalFlux& flux(double m, double M) const;

 private:
  const std::vector<double>& wave_speeds(double m, double M) const;
  /// Per subcell [C_0(m, v_e) - 1e-9, C_0(M, v_e) + 1e-9], interleaved.
  const std::vector<double>& guard_bounds(double m, double M) const;

  std::shared_ptr<const PrimalMesh> mesh_;
  std::shared_ptr<const DualGeometry> dual_;
  std::shared_ptr<const ColorField> color_;
  std::shared_ptr<const CouplingModel> model_;
  SchemeOptions options_;
  std::vector<WeightedColor> pairs_;  // (alpha, v_e) per subcell

  mutable std::array<double, 4> speeds_key_{};
  mutable std::vector<double> speeds_;
  mutable std::unique_ptr<NumericalFlux> flux_;
  mutable std::array<double, 2> bounds_key_{};
  mutable std::vector<double> bounds_;
};

}  // namespace wbfv
