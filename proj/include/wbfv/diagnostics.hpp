#pragma once

#include <functional>
#include <limits>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "wbfv/scheme.hpp"

namespace wbfv {

/// Convex entropy U with its first two derivatives.
struct Entropy {
  std::function<double(double)> U;
  std::function<double(double)> dU;
  std::function<double(double)> d2U;
  std::string name = "custom";

  /// U(w) = w^2 / 2
  static Entropy quadratic();
};

/// Q(u, v) = int_0^u U'(C_0(t, v)) dC/dt(t, v) dt, adaptive Simpson at `tol`.
Vec2 entropy_flux(const CouplingModel& model, const Entropy& entropy, double u, const ColorVector& v,
                  double tol = 1e-10);

/// Subcell entropy residuals
///   U(w^{n+1,-}) - U(w^n) + tau |e| / (alpha |K|) (G_{e,K} - F(w^n) . nu_{K,e})
/// for every subcell of a step. Rusanov uses the diffusive entropy flux with
/// the step's lambda; Godunov evaluates F at the extremizing state.
/// Per-subcell Q(u, v_e) . nu_e reused while u is unchanged.
struct EntropyFluxCache {
  std::vector<double> u;
  std::vector<double> q;
};

std::vector<double> entropy_residuals(const WellBalancedScheme& scheme, const StepRecord& record,
                                      const Entropy& entropy, EntropyFluxCache* cache = nullptr);

/// Worst signed margin of u^{n+1}_K against [min, max] of u^n over K and its
/// edge neighbours (negative means a violation).
double max_principle_margin(const PrimalMesh& mesh, const StepRecord& record);

/// sum_K sum_e alpha |w^{n+1}_K - w^{n+1,-}_{K,e}|^2 psi_K |K| with psi = 1.
double oscillation_increment(const PrimalMesh& mesh, const DualGeometry& dual, const StepRecord& record);

/// Largest local coefficient |g(wL,wR) - g(wL,wL)| / |wR - wL| * tau |e| / (alpha |K|)
/// over subcells with |wR - wL| > 1e-12.
double local_cfl(const PrimalMesh& mesh, const DualGeometry& dual, const StepRecord& record);

struct DiagnosticsRow {
  double t = 0.0;
  double tau = 0.0;
  double max_principle_margin = 0.0;
  double entropy_residual_max = 0.0;
  double oscillation_increment = 0.0;
  double oscillation_sum = 0.0;
  double local_cfl = 0.0;
  /// max_K |u_K - u*| when armed with a reference state, else NaN.
  double well_balanced_drift = std::numeric_limits<double>::quiet_NaN();
};

struct DiagnosticsLog {
  std::vector<DiagnosticsRow> rows;
  /// min U'' over the realized w-range.
  double sigma_U = std::numeric_limits<double>::quiet_NaN();
  double w_min = std::numeric_limits<double>::infinity();
  double w_max = -std::numeric_limits<double>::infinity();

  void write_csv(std::ostream& out) const;
};

/// Accumulates one DiagnosticsRow per step.
class DiagnosticsMonitor {
 public:
  DiagnosticsMonitor(const WellBalancedScheme& scheme, Entropy entropy, std::optional<double> u_star = std::nullopt)
      : scheme_(scheme), entropy_(std::move(entropy)), u_star_(u_star) {}

  void observe(const StepRecord& record, double t_next);
  const DiagnosticsLog& log() const { return log_; }
  DiagnosticsLog& log() { return log_; }

 private:
  const WellBalancedScheme& scheme_;
  Entropy entropy_;
  std::optional<double> u_star_;
  DiagnosticsLog log_;
  EntropyFluxCache cache_;
};

double oscillation_sum(const DiagnosticsLog& log);
/// Worst margin over all steps (+inf for an empty log).
double check_max_principle(const DiagnosticsLog& log);

/// A stored field at one time level.
struct Snapshot {
  double t = 0.0;
  std::size_t step = 0;
  std::vector<double> u;
  std::vector<double> w;  // w_K = sum_e alpha C_0(u_K, v_e)
};

/// max over snapshots and cells of |u_K - u*|. Throws MeasurementError when
/// the first snapshot is not constant.
double check_well_balanced(const std::vector<Snapshot>& snapshots, double u_star);

struct FrontMeasurement {
  double speed = 0.0;
  std::vector<double> times;
  std::vector<double> positions;
};

/// Level-set crossings of `threshold` are located by linear interpolation
/// between the centroids of adjacent cells whose centroids both lie in
/// `window` (and, when `cells` is non-empty, that are both flagged in it); the
/// mean crossing position along `direction` is fitted against time by least
/// squares. Throws MeasurementError when a snapshot has no crossing.
FrontMeasurement front_speed(const PrimalMesh& mesh, const std::vector<Snapshot>& snapshots, double threshold,
                             Vec2 direction, const BoundingBox& window, const std::vector<bool>& cells = {});

/// Rankine-Hugoniot speed (f(a) - f(b)) . nu / (a - b) of a flux family.
double rankine_hugoniot_speed(const FluxFamily& flux, double a, double b, Vec2 nu);

}  // namespace wbfv
