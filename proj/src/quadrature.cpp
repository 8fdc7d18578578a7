#include "wbfv/quadrature.hpp"

#include <numbers>

namespace wbfv {

GaussRule gauss_legendre(std::size_t order) {
  if (order == 0) throw std::invalid_argument("gauss_legendre: order must be positive");
  if (order == 1) return {{0.0}, {2.0}};
  GaussRule rule;
  rule.nodes.resize(order);
  rule.weights.resize(order);
  const std::size_t half = (order + 1) / 2;
  const double n = static_cast<double>(order);
  for (std::size_t i = 0; i < half; ++i) {
    // Chebyshev-like initial guess, then Newton on P_n.
    double x = std::cos(std::numbers::pi * (static_cast<double>(i) + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0;
      double p1 = x;
      for (std::size_t k = 2; k <= order; ++k) {
        const double kk = static_cast<double>(k);
        const double p2 = ((2.0 * kk - 1.0) * x * p1 - (kk - 1.0) * p0) / kk;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.nodes[i] = -x;
    rule.nodes[order - 1 - i] = x;
    rule.weights[i] = w;
    rule.weights[order - 1 - i] = w;
  }
  return rule;
}

}  // namespace wbfv
