#pragma once

#include <cstddef>
#include <memory>
#include <string>

#include "wbfv/coupling.hpp"

namespace wbfv {

enum class FluxKind { kRusanov, kGodunov };

std::string to_string(FluxKind kind);
/// "rusanov" or "godunov"; throws ConfigError otherwise.
FluxKind parse_flux_kind(const std::string& name);

/// One side of an edge: the state in both variables plus the directional
/// flux phi(w) = f(w, v) . nu and its u-derivative.
struct FluxSide {
  double u = 0.0;
  double w = 0.0;
  double phi = 0.0;
  double dphi_du = 0.0;
  double dw_du = 1.0;
};

struct FluxValue {
  double value = 0.0;
  /// Diffusion coefficient (Rusanov) or 0.
  double lambda = 0.0;
  /// Extremizing state in u (Godunov) or NaN.
  double u_star = 0.0;
};

/// Two-point monotone flux g(wL, wR; v, nu) for a coupling model.
///
/// Rusanov: 1/2 (phi(wL) + phi(wR)) - 1/2 lambda (wR - wL), with lambda the
/// largest |phi'(w)| over the points of a fixed u-lattice
/// (`samples` intervals over [m, M], extended periodically) touching the
/// interval, times `rusanov_safety`. The fixed lattice makes lambda grow with
/// the interval, which keeps the flux monotone.
///
/// Godunov: min of phi over [wL, wR] when wL <= wR, max over [wR, wL]
/// otherwise; dense sampling plus golden-section refinement in u.
class NumericalFlux {
 public:
  NumericalFlux(std::shared_ptr<const CouplingModel> model, FluxKind kind, double m, double M,
                std::size_t samples = 64);

  FluxKind kind() const { return kind_; }
  const CouplingModel& model() const { return *model_; }
  double range_min() const { return m_; }
  double range_max() const { return M_; }

  double rusanov_safety = 1.01;
  double golden_tolerance = 1e-10;

  FluxSide side(double u, const ColorVector& v, Vec2 nu) const;
  FluxValue evaluate(const FluxSide& left, const FluxSide& right, const ColorVector& v, Vec2 nu) const;
  double operator()(double wL, double wR, const ColorVector& v, Vec2 nu) const;

 private:
  double rusanov_lambda(const FluxSide& a, const FluxSide& b, const ColorVector& v, Vec2 nu) const;
  FluxValue godunov(const FluxSide& left, const FluxSide& right, const ColorVector& v, Vec2 nu) const;

  std::shared_ptr<const CouplingModel> model_;
  FluxKind kind_;
  double m_;
  double M_;
  std::size_t samples_;
  double spacing_;
};

/// phi(w) = f(w, v) . nu
double directional_flux(const CouplingModel& model, double w, const ColorVector& v, Vec2 nu);

/// Rusanov flux with the lattice spanning [min(uL,uR), max(uL,uR)].
double rusanov(const CouplingModel& model, double wL, double wR, const ColorVector& v, Vec2 nu,
               double safety = 1.01);
double godunov(const CouplingModel& model, double wL, double wR, const ColorVector& v, Vec2 nu);

/// safety * max |d phi / dw| over `samples` equispaced u in [m, M].
double wave_speed_bound(const CouplingModel& model, const ColorVector& v, Vec2 nu, double m, double M,
                        std::size_t samples = 64, double safety = 1.05);

}  // namespace wbfv
