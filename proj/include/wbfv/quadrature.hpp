#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace wbfv {

struct GaussRule {
  std::vector<double> nodes;    // on [-1, 1]
  std::vector<double> weights;  // sum to 2
};

/// Gauss-Legendre rule with `order` points.
GaussRule gauss_legendre(std::size_t order);

inline double max_abs(double x) { return std::abs(x); }

/// Adaptive Simpson quadrature of a callable returning a vector-like value
/// `T` (anything with +, -, scalar *, and a `max_abs` overload).
template <class T, class F>
T adaptive_simpson(F&& f, double a, double b, double tol, int max_depth = 48) {
  struct Impl {
    F& f;
    T step(double a, double b, const T& fa, const T& fm, const T& fb, const T& whole, double tol, int depth) {
      const double m = 0.5 * (a + b);
      const double lm = 0.5 * (a + m);
      const double rm = 0.5 * (m + b);
      const T flm = f(lm);
      const T frm = f(rm);
      const T left = (fa + 4.0 * flm + fm) * ((m - a) / 6.0);
      const T right = (fm + 4.0 * frm + fb) * ((b - m) / 6.0);
      const T delta = left + right - whole;
      if (depth <= 0 || max_abs(delta) <= 15.0 * tol) return left + right + delta * (1.0 / 15.0);
      return step(a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) + step(m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
    }
  };
  if (a == b) return f(a) * 0.0;
  Impl impl{f};
  const double m = 0.5 * (a + b);
  const T fa = f(a);
  const T fm = f(m);
  const T fb = f(b);
  const T whole = (fa + 4.0 * fm + fb) * ((b - a) / 6.0);
  return impl.step(a, b, fa, fm, fb, whole, tol, max_depth);
}

}  // namespace wbfv
