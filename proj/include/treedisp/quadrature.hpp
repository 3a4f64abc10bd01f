#pragma once

#include <cmath>
#include <complex>
#include <vector>

namespace treedisp::quad {

/// Gauss–Legendre rule on [-1, 1].
struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// n-point rule, computed once per n and cached (thread-safe).
const GaussRule& gauss_legendre(int n);

/// Composite Gauss–Legendre: `panels` equal panels on [a, b], `order` nodes each.
template <class F>
auto integrate_composite(F&& f, double a, double b, int panels, int order = 32) {
  const GaussRule& rule = gauss_legendre(order);
  const double h = (b - a) / panels;
  using R = decltype(f(a));
  R total{};
  for (int p = 0; p < panels; ++p) {
    const double mid = a + (p + 0.5) * h;
    R panel{};
    for (int j = 0; j < order; ++j) panel += rule.weights[j] * f(mid + 0.5 * h * rule.nodes[j]);
    total += panel * (0.5 * h);
  }
  return total;
}

}  // namespace treedisp::quad
