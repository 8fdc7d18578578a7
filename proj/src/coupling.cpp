#include "wbfv/coupling.hpp"

#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include "wbfv/error.hpp"

namespace wbfv {

// ---------------------------------------------------------------------------
// ScalarProfile

ScalarProfile ScalarProfile::linear(double slope) {
  ScalarProfile p;
  p.kind_ = Kind::kLinear;
  p.p0_ = slope;
  return p;
}

ScalarProfile ScalarProfile::shifted_quadratic(double shift) {
  ScalarProfile p;
  p.kind_ = Kind::kShiftedQuadratic;
  p.p0_ = shift;
  return p;
}

ScalarProfile ScalarProfile::cubic(double a, double b) {
  ScalarProfile p;
  p.kind_ = Kind::kCubic;
  p.p0_ = a;
  p.p1_ = b;
  return p;
}

ScalarProfile ScalarProfile::custom(std::function<double(double)> f, std::function<double(double)> df,
                                    std::function<double(double)> d2f, std::string name) {
  ScalarProfile p;
  p.kind_ = Kind::kCustom;
  p.custom_ = std::make_shared<const Custom>(Custom{std::move(f), std::move(df), std::move(d2f), std::move(name)});
  return p;
}

std::vector<double> ScalarProfile::parameters() const {
  switch (kind_) {
    case Kind::kLinear:
    case Kind::kShiftedQuadratic: return {p0_};
    case Kind::kCubic: return {p0_, p1_};
    case Kind::kCustom: break;
  }
  return {};
}

std::string ScalarProfile::name() const {
  switch (kind_) {
    case Kind::kLinear: return "linear";
    case Kind::kShiftedQuadratic: return "shifted_quadratic";
    case Kind::kCubic: return "cubic";
    case Kind::kCustom: break;
  }
  return custom_->name;
}

// ---------------------------------------------------------------------------
// ColorVector

ColorVector::ColorVector(std::initializer_list<double> values) : size_(values.size()) {
  check_size();
  std::size_t i = 0;
  for (double x : values) v_[i++] = x;
}

ColorVector ColorVector::vertex(std::size_t size, std::size_t l) {
  ColorVector v(size);
  if (l >= 1 && l <= size) v[l - 1] = 1.0;
  return v;
}

void ColorVector::check_size() const {
  if (size_ > kMaxComponents) {
    throw ModelError("at most " + std::to_string(kMaxComponents) + " coupled components are supported");
  }
}

bool ColorVector::in_simplex(double tol) const {
  for (std::size_t i = 0; i < size_; ++i) {
    if (v_[i] < -tol) return false;
  }
  return total() <= 1.0 + tol;
}

bool ColorVector::operator==(const ColorVector& o) const {
  if (size_ != o.size_) return false;
  for (std::size_t i = 0; i < size_; ++i) {
    if (v_[i] != o.v_[i]) return false;
  }
  return true;
}

// ---------------------------------------------------------------------------
// LinearCoupling

LinearCoupling::LinearCoupling(std::vector<ScalarProfile> gammas, std::vector<FluxFamily> fluxes)
    : gammas_(std::move(gammas)), fluxes_(std::move(fluxes)) {}

double LinearCoupling::c0(double u, const ColorVector& v) const {
  double acc = v.reference_weight() * gammas_[0].value(u);
  for (std::size_t l = 1; l < gammas_.size(); ++l) acc += v[l - 1] * gammas_[l].value(u);
  return acc;
}

double LinearCoupling::dc0_du(double u, const ColorVector& v) const {
  double acc = v.reference_weight() * gammas_[0].derivative(u);
  for (std::size_t l = 1; l < gammas_.size(); ++l) acc += v[l - 1] * gammas_[l].derivative(u);
  return acc;
}

CouplingSample LinearCoupling::sample(double u, const ColorVector& v) const {
  CouplingSample s;
  for (std::size_t l = 0; l < gammas_.size(); ++l) {
    const double weight = l == 0 ? v.reference_weight() : v[l - 1];
    const double g = gammas_[l].value(u);
    const double dg = gammas_[l].derivative(u);
    const FluxFamily& f = fluxes_[l];
    const double a = f.profile.value(g);
    const double da = f.profile.derivative(g) * dg;
    s.c0 += weight * g;
    s.dc0 += weight * dg;
    s.c += f.direction * (weight * a);
    s.dc += f.direction * (weight * da);
  }
  return s;
}

Vec2 LinearCoupling::dc_dv(double u, const ColorVector&, std::size_t l) const {
  return fluxes_[l].value(gammas_[l].value(u)) - fluxes_[0].value(gammas_[0].value(u));
}

std::shared_ptr<const LinearCoupling> make_linear_coupling(std::vector<ScalarProfile> gammas,
                                                           std::vector<FluxFamily> fluxes,
                                                           const ProbeRange& probe) {
  if (gammas.size() != fluxes.size()) {
    throw ModelError("coupling needs as many flux families as gamma maps");
  }
  if (gammas.size() < 2 || gammas.size() > kMaxComponents + 1) {
    throw ModelError("coupling needs between 2 and " + std::to_string(kMaxComponents + 1) + " components");
  }
  for (std::size_t l = 0; l < gammas.size(); ++l) {
    double prev = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < probe.points; ++i) {
      const double t = probe.points == 1 ? 0.0 : static_cast<double>(i) / static_cast<double>(probe.points - 1);
      const double u = probe.lo + t * (probe.hi - probe.lo);
      const double g = gammas[l].value(u);
      if (!(g > prev) || !(gammas[l].derivative(u) > 0.0)) {
        std::ostringstream msg;
        msg << "gamma_" << l << " is not strictly increasing near u = " << u;
        throw ModelError(msg.str());
      }
      prev = g;
    }
  }
  return std::make_shared<const LinearCoupling>(std::move(gammas), std::move(fluxes));
}

ModelProbeReport probe_model(const CouplingModel& model, const ProbeRange& range, std::size_t samples,
                             std::uint64_t seed, double tol) {
  ModelProbeReport r;
  r.min_dc0 = std::numeric_limits<double>::infinity();
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const std::size_t L = model.components();
  for (std::size_t n = 0; n < samples; ++n) {
    const double u = range.lo + unit(rng) * (range.hi - range.lo);
    for (std::size_t l = 0; l <= L; ++l) {
      const ColorVector e = ColorVector::vertex(L, l);
      const double g = model.gamma(l, u);
      const CouplingSample s = model.sample(u, e);
      const Vec2 a = model.flux(l, g);
      r.max_vertex_c0_error = std::max(r.max_vertex_c0_error, std::abs(s.c0 - g));
      r.max_vertex_flux_error = std::max({r.max_vertex_flux_error, std::abs(s.c.x - a.x), std::abs(s.c.y - a.y)});
    }
    // Uniform point of the simplex hull via sorted spacings of L+1 exponentials.
    ColorVector v(L);
    double total = 0.0;
    std::array<double, kMaxComponents + 1> ex{};
    for (std::size_t l = 0; l <= L; ++l) {
      ex[l] = -std::log(1.0 - unit(rng));
      total += ex[l];
    }
    for (std::size_t l = 0; l < L; ++l) v[l] = ex[l + 1] / total;
    r.min_dc0 = std::min(r.min_dc0, model.dc0_du(u, v));
  }
  r.pass = r.max_vertex_c0_error <= tol && r.max_vertex_flux_error <= tol && r.min_dc0 > 0.0;
  return r;
}

std::shared_ptr<const FunctionCoupling> make_function_coupling(CouplingEvaluators ev, const ProbeRange& range) {
  if (ev.gammas.size() != ev.components + 1 || ev.fluxes.size() != ev.components + 1) {
    throw ModelError("coupling evaluators need L+1 gamma maps and flux families");
  }
  if (!ev.c0 || !ev.dc0_du || !ev.c || !ev.dc_du || !ev.dc_dv) {
    throw ModelError("coupling evaluators are incomplete");
  }
  auto model = std::make_shared<const FunctionCoupling>(std::move(ev));
  const ModelProbeReport r = probe_model(*model, range, 1000, 0x5eed);
  if (!r.pass) {
    std::ostringstream msg;
    msg << "coupling functions fail probing: vertex C0 error " << r.max_vertex_c0_error << ", vertex flux error "
        << r.max_vertex_flux_error << ", min dC0/du " << r.min_dc0;
    throw ModelError(msg.str());
  }
  return model;
}

// ---------------------------------------------------------------------------
// Monotone inversion

namespace {

/// Solve F(u) = target for a strictly increasing F given as u -> {F, F'}.
/// Newton iterates are kept inside the current bracket; a step that leaves
/// it falls back to bisection, or to doubling expansion while one side of
/// the bracket is still open.
template <class Eval>
double solve_increasing(Eval&& eval, double target, const RootOptions& opt) {
  const double tol = opt.tol * (1.0 + std::abs(target));
  constexpr double inf = std::numeric_limits<double>::infinity();
  double lo = -inf;
  double hi = inf;
  double x = opt.guess;
  auto [f, df] = eval(x);
  double r = f - target;
  double expand = std::max(1.0, std::abs(x));

  const auto check_finite = [&](double value) {
    if (!std::isfinite(value)) throw RootError("non-finite coupling function value during inversion");
  };
  check_finite(r);

  for (int it = 0; it < opt.max_iterations; ++it) {
    if (r == 0.0) return x;
    if (r > 0.0) {
      hi = x;
    } else {
      lo = x;
    }
    if (std::abs(r) <= tol) {
      // Polish: accept further Newton steps only while they reduce the residual.
      for (int k = 0; k < 3 && r != 0.0 && df > 0.0; ++k) {
        const double x2 = x - r / df;
        const auto [f2, df2] = eval(x2);
        const double r2 = f2 - target;
        if (!(std::abs(r2) < std::abs(r))) break;
        x = x2;
        r = r2;
        df = df2;
      }
      return x;
    }
    double next = df > 0.0 ? x - r / df : std::numeric_limits<double>::quiet_NaN();
    const bool bounded = std::isfinite(lo) && std::isfinite(hi);
    if (bounded) {
      if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
      // Adjacent doubles: nothing left to refine.
      if (next <= lo || next >= hi) return x;
    } else if (std::isfinite(hi)) {
      // Root lies below x; Newton must move down, otherwise expand.
      if (!(next < x)) next = x - expand;
      expand *= 2.0;
    } else {
      if (!(next > x)) next = x + expand;
      expand *= 2.0;
    }
    if (std::abs(next) > opt.max_abs) throw RootError("bracket expansion exceeded the configured range");
    x = next;
    std::tie(f, df) = eval(x);
    r = f - target;
    check_finite(r);
  }
  throw RootError("monotone inversion did not converge");
}

}  // namespace

double invert_c0(const CouplingModel& model, double w, const ColorVector& v, const RootOptions& opt) {
  return solve_increasing(
      [&](double u) { return std::pair<double, double>{model.c0(u, v), model.dc0_du(u, v)}; }, w, opt);
}

double invert_c0_weighted(const CouplingModel& model, double w, std::span<const WeightedColor> pairs,
                          const RootOptions& opt) {
  return solve_increasing(
      [&](double u) {
        double f = 0.0;
        double df = 0.0;
        for (const WeightedColor& p : pairs) {
          f += p.alpha * model.c0(u, p.v);
          df += p.alpha * model.dc0_du(u, p.v);
        }
        return std::pair<double, double>{f, df};
      },
      w, opt);
}

Vec2 eval_flux_w(const CouplingModel& model, double w, const ColorVector& v, const RootOptions& opt) {
  const double u = invert_c0(model, w, v, opt);
  return model.sample(u, v).c;
}

Vec2 eval_dflux_dw(const CouplingModel& model, double w, const ColorVector& v, const RootOptions& opt) {
  const double u = invert_c0(model, w, v, opt);
  const CouplingSample s = model.sample(u, v);
  return s.dc / s.dc0;
}

}  // namespace wbfv
