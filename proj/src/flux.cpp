#include "wbfv/flux.hpp"

#include <cmath>
#include <limits>
#include <vector>

#include "wbfv/error.hpp"

namespace wbfv {

std::string to_string(FluxKind kind) { return kind == FluxKind::kRusanov ? "rusanov" : "godunov"; }

FluxKind parse_flux_kind(const std::string& name) {
  if (name == "rusanov") return FluxKind::kRusanov;
  if (name == "godunov") return FluxKind::kGodunov;
  throw ConfigError("unknown flux '" + name + "' (expected rusanov or godunov)");
}

NumericalFlux::NumericalFlux(std::shared_ptr<const CouplingModel> model, FluxKind kind, double m, double M,
                             std::size_t samples)
    : model_(std::move(model)), kind_(kind), m_(m), M_(M), samples_(std::max<std::size_t>(samples, 2)) {
  if (!(m <= M)) throw ModelError("flux state range needs m <= M");
  if (M > m) {
    spacing_ = (M - m) / static_cast<double>(samples_);
  } else {
    // Degenerate range: a lattice of the same density on a small neighbourhood.
    spacing_ = 0.2 * std::max(1.0, std::abs(m)) / static_cast<double>(samples_);
  }
}

FluxSide NumericalFlux::side(double u, const ColorVector& v, Vec2 nu) const {
  const CouplingSample s = model_->sample(u, v);
  return {u, s.c0, dot(s.c, nu), dot(s.dc, nu), s.dc0};
}

double NumericalFlux::rusanov_lambda(const FluxSide& a, const FluxSide& b, const ColorVector& v, Vec2 nu) const {
  // Lattice nodes only: an endpoint term would let lambda grow while the
  // interval shrinks, and the flux would lose monotonicity. Peaks of |phi'|
  // between nodes are caught by the vertex of the parabola through each
  // node triple.
  const double lo = std::min(a.u, b.u);
  const double hi = std::max(a.u, b.u);
  const auto i0 = static_cast<long long>(std::floor((lo - m_) / spacing_));
  const auto i1 = static_cast<long long>(std::ceil((hi - m_) / spacing_));
  const auto slope = [&](long long i) {
    const CouplingSample s = model_->sample(m_ + static_cast<double>(i) * spacing_, v);
    return dot(s.dc, nu) / s.dc0;
  };
  double prev = slope(i0 - 1);
  double cur = slope(i0);
  double lam = std::abs(cur);
  for (long long i = i0; i <= i1; ++i) {
    const double next = slope(i + 1);
    lam = std::max(lam, std::abs(cur));
    const double curv = next - 2.0 * cur + prev;
    if (curv != 0.0) {
      const double t = -0.5 * (next - prev) / curv;
      if (std::abs(t) < 1.0) lam = std::max(lam, std::abs(cur + 0.25 * (next - prev) * t));
    }
    prev = cur;
    cur = next;
  }
  return rusanov_safety * lam;
}

namespace {

constexpr double kInvPhi = 0.6180339887498949;  // (sqrt(5) - 1) / 2

}  // namespace

FluxValue NumericalFlux::godunov(const FluxSide& left, const FluxSide& right, const ColorVector& v, Vec2 nu) const {
  if (left.u == right.u) return {left.phi, 0.0, left.u};
  // Minimize h = sgn * phi over [a, b]. The mirrored call (sides swapped, nu
  // negated) produces bitwise the same h, so conservation holds exactly.
  const double sgn = left.u < right.u ? 1.0 : -1.0;
  const FluxSide& sa = left.u < right.u ? left : right;
  const FluxSide& sb = left.u < right.u ? right : left;
  const double a = sa.u;
  const double b = sb.u;
  const auto h = [&](double u) { return sgn * dot(model_->sample(u, v).c, nu); };
  const std::size_t n = samples_;

  const auto node = [&](std::size_t i) {
    if (i == 0) return a;
    if (i == n - 1) return b;
    return a + (b - a) * (static_cast<double>(i) / static_cast<double>(n - 1));
  };
  std::vector<double> hs(n);
  hs[0] = sgn * sa.phi;
  hs[n - 1] = sgn * sb.phi;
  for (std::size_t i = 1; i + 1 < n; ++i) hs[i] = h(node(i));
  std::size_t best = 0;
  for (std::size_t i = 1; i < n; ++i) {
    if (hs[i] < hs[best]) best = i;
  }
  double best_h = hs[best];
  double best_u = node(best);

  // Refine every sampled local minimum: the sampled best need not sit in the
  // bracket of the true one when two wells are nearly level.
  const auto refine = [&](double lo, double hi) {
    double x1 = hi - kInvPhi * (hi - lo);
    double x2 = lo + kInvPhi * (hi - lo);
    double h1 = h(x1);
    double h2 = h(x2);
    while (hi - lo > golden_tolerance) {
      if (h1 <= h2) {
        hi = x2;
        x2 = x1;
        h2 = h1;
        x1 = hi - kInvPhi * (hi - lo);
        h1 = h(x1);
      } else {
        lo = x1;
        x1 = x2;
        h1 = h2;
        x2 = lo + kInvPhi * (hi - lo);
        h2 = h(x2);
      }
      if (!(x1 > lo && x2 < hi)) break;
    }
    if (h1 < best_h) {
      best_h = h1;
      best_u = x1;
    }
    if (h2 < best_h) {
      best_h = h2;
      best_u = x2;
    }
  };
  if (hs[0] <= hs[1] && sgn * sa.dphi_du < 0.0) refine(node(0), node(1));
  for (std::size_t i = 1; i + 1 < n; ++i) {
    if (hs[i] <= hs[i - 1] && hs[i] <= hs[i + 1]) refine(node(i - 1), node(i + 1));
  }
  if (hs[n - 1] <= hs[n - 2] && sgn * sb.dphi_du > 0.0) refine(node(n - 2), node(n - 1));
  return {sgn * best_h, 0.0, best_u};
}

FluxValue NumericalFlux::evaluate(const FluxSide& left, const FluxSide& right, const ColorVector& v, Vec2 nu) const {
  if (kind_ == FluxKind::kGodunov) return godunov(left, right, v, nu);
  // Equal states: the diffusion term vanishes whatever lambda is.
  if (left.u == right.u) return {left.phi, 0.0, std::numeric_limits<double>::quiet_NaN()};
  const double lam = rusanov_lambda(left, right, v, nu);
  return {0.5 * (left.phi + right.phi) - 0.5 * lam * (right.w - left.w), lam,
          std::numeric_limits<double>::quiet_NaN()};
}

double NumericalFlux::operator()(double wL, double wR, const ColorVector& v, Vec2 nu) const {
  RootOptions opt;
  opt.guess = 0.5 * (m_ + M_);
  FluxSide l = side(invert_c0(*model_, wL, v, opt), v, nu);
  FluxSide r = side(invert_c0(*model_, wR, v, opt), v, nu);
  l.w = wL;
  r.w = wR;
  if (wL == wR) r = l;
  return evaluate(l, r, v, nu).value;
}

double directional_flux(const CouplingModel& model, double w, const ColorVector& v, Vec2 nu) {
  return dot(eval_flux_w(model, w, v), nu);
}

namespace {

std::shared_ptr<const CouplingModel> borrow(const CouplingModel& model) {
  return std::shared_ptr<const CouplingModel>(std::shared_ptr<const CouplingModel>{}, &model);
}

}  // namespace

double rusanov(const CouplingModel& model, double wL, double wR, const ColorVector& v, Vec2 nu, double safety) {
  const double uL = invert_c0(model, wL, v);
  const double uR = invert_c0(model, wR, v);
  NumericalFlux g(borrow(model), FluxKind::kRusanov, std::min(uL, uR), std::max(uL, uR));
  g.rusanov_safety = safety;
  return g(wL, wR, v, nu);
}

double godunov(const CouplingModel& model, double wL, double wR, const ColorVector& v, Vec2 nu) {
  const double uL = invert_c0(model, wL, v);
  const double uR = invert_c0(model, wR, v);
  NumericalFlux g(borrow(model), FluxKind::kGodunov, std::min(uL, uR), std::max(uL, uR));
  return g(wL, wR, v, nu);
}

double wave_speed_bound(const CouplingModel& model, const ColorVector& v, Vec2 nu, double m, double M,
                        std::size_t samples, double safety) {
  const std::size_t n = std::max<std::size_t>(samples, 2);
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double u = i == n - 1 ? M : m + (M - m) * (static_cast<double>(i) / static_cast<double>(n - 1));
    const CouplingSample cs = model.sample(u, v);
    s = std::max(s, std::abs(dot(cs.dc, nu) / cs.dc0));
  }
  return safety * s;
}

}  // namespace wbfv
