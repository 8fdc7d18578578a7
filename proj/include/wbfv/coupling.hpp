#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "wbfv/geometry.hpp"

namespace wbfv {

// ---------------------------------------------------------------------------
// Scalar maps

/// A twice-differentiable real function of one variable with closed-form
/// derivatives. Named families serialize back to their config spelling;
/// custom ones carry caller-supplied evaluators.
class ScalarProfile {
 public:
  enum class Kind { kLinear, kShiftedQuadratic, kCubic, kCustom };

  /// x -> slope * x
  static ScalarProfile linear(double slope);
  /// x -> (x - shift)^2 / 2
  static ScalarProfile shifted_quadratic(double shift);
  /// x -> a x^3 + b x
  static ScalarProfile cubic(double a, double b);
  static ScalarProfile custom(std::function<double(double)> f, std::function<double(double)> df,
                              std::function<double(double)> d2f, std::string name = "custom");

  double value(double x) const {
    switch (kind_) {
      case Kind::kLinear: return p0_ * x;
      case Kind::kShiftedQuadratic: return 0.5 * (x - p0_) * (x - p0_);
      case Kind::kCubic: return (p0_ * x * x + p1_) * x;
      case Kind::kCustom: break;
    }
    return custom_->f(x);
  }
  double derivative(double x) const {
    switch (kind_) {
      case Kind::kLinear: return p0_;
      case Kind::kShiftedQuadratic: return x - p0_;
      case Kind::kCubic: return 3.0 * p0_ * x * x + p1_;
      case Kind::kCustom: break;
    }
    return custom_->df(x);
  }
  double second_derivative(double x) const {
    switch (kind_) {
      case Kind::kLinear: return 0.0;
      case Kind::kShiftedQuadratic: return 1.0;
      case Kind::kCubic: return 6.0 * p0_ * x;
      case Kind::kCustom: break;
    }
    return custom_->d2f(x);
  }

  Kind kind() const { return kind_; }
  std::vector<double> parameters() const;
  std::string name() const;

 private:
  struct Custom {
    std::function<double(double)> f, df, d2f;
    std::string name;
  };
  Kind kind_ = Kind::kLinear;
  double p0_ = 1.0;
  double p1_ = 0.0;
  std::shared_ptr<const Custom> custom_;
};

/// Flux family A^l(w) = profile(w) * direction.
struct FluxFamily {
  ScalarProfile profile = ScalarProfile::shifted_quadratic(0.0);
  Vec2 direction{1.0, 0.0};

  Vec2 value(double w) const { return direction * profile.value(w); }
  Vec2 derivative(double w) const { return direction * profile.derivative(w); }
};

// ---------------------------------------------------------------------------
// Color vectors

inline constexpr std::size_t kMaxComponents = 6;

/// A point (v_1, ..., v_L) of the simplex hull B^L_+.
class ColorVector {
 public:
  ColorVector() = default;
  explicit ColorVector(std::size_t size) : size_(size) { check_size(); }
  ColorVector(std::initializer_list<double> values);
  static ColorVector vertex(std::size_t size, std::size_t l);  // e_l, l in 1..size

  std::size_t size() const { return size_; }
  double operator[](std::size_t i) const { return v_[i]; }
  double& operator[](std::size_t i) { return v_[i]; }
  /// Sum of the components.
  double total() const {
    double s = 0.0;
    for (std::size_t i = 0; i < size_; ++i) s += v_[i];
    return s;
  }
  /// Weight of the reference component, 1 - sum v_l.
  double reference_weight() const { return 1.0 - total(); }
  bool in_simplex(double tol = 0.0) const;
  bool operator==(const ColorVector& o) const;

 private:
  void check_size() const;
  std::array<double, kMaxComponents> v_{};
  std::size_t size_ = 0;
};

// ---------------------------------------------------------------------------
// Coupling model

/// Everything the scheme needs at one point (u, v): the conserved variable
/// C_0, its u-derivative, the flux vector (C_1, C_2) and its u-derivative.
struct CouplingSample {
  double c0 = 0.0;
  double dc0 = 0.0;
  Vec2 c;
  Vec2 dc;
};

/// The (L+1)-component coupling: maps gamma_l, fluxes A^l, and coupling
/// functions C_0, C_i. Immutable; evaluators are pure.
class CouplingModel {
 public:
  virtual ~CouplingModel() = default;

  /// Number L of non-reference components.
  virtual std::size_t components() const = 0;

  virtual double c0(double u, const ColorVector& v) const = 0;
  virtual double dc0_du(double u, const ColorVector& v) const = 0;
  virtual CouplingSample sample(double u, const ColorVector& v) const = 0;
  /// d C_i / d v_l at fixed u, for l in 1..L.
  virtual Vec2 dc_dv(double u, const ColorVector& v, std::size_t l) const = 0;

  /// gamma_l and A^l for l in 0..L (the pure-domain data).
  virtual double gamma(std::size_t l, double u) const = 0;
  virtual Vec2 flux(std::size_t l, double w) const = 0;
  virtual Vec2 flux_derivative(std::size_t l, double w) const = 0;
};

/// C_0(u,v) = (1 - sum v_l) gamma_0(u) + sum v_l gamma_l(u), and likewise
/// C_i with a_i^l(gamma_l(u)).
class LinearCoupling final : public CouplingModel {
 public:
  LinearCoupling(std::vector<ScalarProfile> gammas, std::vector<FluxFamily> fluxes);

  std::size_t components() const override { return gammas_.size() - 1; }
  double c0(double u, const ColorVector& v) const override;
  double dc0_du(double u, const ColorVector& v) const override;
  CouplingSample sample(double u, const ColorVector& v) const override;
  Vec2 dc_dv(double u, const ColorVector& v, std::size_t l) const override;
  double gamma(std::size_t l, double u) const override { return gammas_[l].value(u); }
  Vec2 flux(std::size_t l, double w) const override { return fluxes_[l].value(w); }
  Vec2 flux_derivative(std::size_t l, double w) const override { return fluxes_[l].derivative(w); }

  const std::vector<ScalarProfile>& gammas() const { return gammas_; }
  const std::vector<FluxFamily>& fluxes() const { return fluxes_; }

 private:
  std::vector<ScalarProfile> gammas_;
  std::vector<FluxFamily> fluxes_;
};

/// Range over which monotonicity of gamma_l is probed at construction.
struct ProbeRange {
  double lo = -10.0;
  double hi = 10.0;
  std::size_t points = 1001;
};

/// Build the linear-in-v coupling. Throws ModelError when the list lengths
/// differ, L is out of range, or some gamma_l is not strictly increasing on
/// the probe grid.
std::shared_ptr<const LinearCoupling> make_linear_coupling(std::vector<ScalarProfile> gammas,
                                                           std::vector<FluxFamily> fluxes,
                                                           const ProbeRange& probe = {});

/// User-supplied coupling functions. The vertex data (gamma_l, A^l) is
/// required so that the model can be probed for consistency.
struct CouplingEvaluators {
  std::size_t components = 1;
  std::function<double(double, const ColorVector&)> c0;
  std::function<double(double, const ColorVector&)> dc0_du;
  std::function<Vec2(double, const ColorVector&)> c;
  std::function<Vec2(double, const ColorVector&)> dc_du;
  std::function<Vec2(double, const ColorVector&, std::size_t)> dc_dv;
  std::vector<ScalarProfile> gammas;
  std::vector<FluxFamily> fluxes;
};

class FunctionCoupling final : public CouplingModel {
 public:
  explicit FunctionCoupling(CouplingEvaluators ev) : ev_(std::move(ev)) {}

  std::size_t components() const override { return ev_.components; }
  double c0(double u, const ColorVector& v) const override { return ev_.c0(u, v); }
  double dc0_du(double u, const ColorVector& v) const override { return ev_.dc0_du(u, v); }
  CouplingSample sample(double u, const ColorVector& v) const override {
    return {ev_.c0(u, v), ev_.dc0_du(u, v), ev_.c(u, v), ev_.dc_du(u, v)};
  }
  Vec2 dc_dv(double u, const ColorVector& v, std::size_t l) const override { return ev_.dc_dv(u, v, l); }
  double gamma(std::size_t l, double u) const override { return ev_.gammas[l].value(u); }
  Vec2 flux(std::size_t l, double w) const override { return ev_.fluxes[l].value(w); }
  Vec2 flux_derivative(std::size_t l, double w) const override { return ev_.fluxes[l].derivative(w); }

 private:
  CouplingEvaluators ev_;
};

struct ModelProbeReport {
  double max_vertex_c0_error = 0.0;    // |C_0(u, e_l) - gamma_l(u)|
  double max_vertex_flux_error = 0.0;  // |C_i(u, e_l) - a_i^l(gamma_l(u))|
  double min_dc0 = 0.0;                // min of d C_0 / du over the samples
  bool pass = false;
};

/// Probe the vertex consistency and the monotonicity of C_0 at random
/// samples u in [range.lo, range.hi], v in the simplex.
ModelProbeReport probe_model(const CouplingModel& model, const ProbeRange& range, std::size_t samples,
                             std::uint64_t seed, double tol = 1e-12);

/// Wraps user-supplied evaluators after probing them; throws ModelError when
/// the probe fails.
std::shared_ptr<const FunctionCoupling> make_function_coupling(CouplingEvaluators ev,
                                                               const ProbeRange& range = {});

// ---------------------------------------------------------------------------
// Monotone inversion

struct RootOptions {
  /// Absolute-plus-relative residual tolerance: |F(u) - w| <= tol (1 + |w|).
  double tol = 1e-12;
  /// Starting point of the search (previous cell value when known).
  double guess = 0.0;
  /// Bracket expansion beyond this magnitude is reported as a root error.
  double max_abs = 1e12;
  int max_iterations = 400;
};

/// u with C_0(u, v) = w.
double invert_c0(const CouplingModel& model, double w, const ColorVector& v, const RootOptions& opt = {});

struct WeightedColor {
  double alpha = 0.0;
  ColorVector v;
};

/// u with sum_e alpha_e C_0(u, v_e) = w.
double invert_c0_weighted(const CouplingModel& model, double w, std::span<const WeightedColor> pairs,
                          const RootOptions& opt = {});

/// f(w, v) = C(u(w, v), v).
Vec2 eval_flux_w(const CouplingModel& model, double w, const ColorVector& v, const RootOptions& opt = {});
/// d f / d w = (d C / du) / (d C_0 / du) at u(w, v).
Vec2 eval_dflux_dw(const CouplingModel& model, double w, const ColorVector& v, const RootOptions& opt = {});

}  // namespace wbfv
