#pragma once

#include <vector>

namespace carleman {

struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;

  std::size_t size() const { return nodes.size(); }
  void append(const QuadratureRule& other);
};

/// n-point Gauss-Legendre rule on [-1, 1] (Newton iteration on P_n).
const QuadratureRule& gauss_legendre(int n);

/// Gauss-Legendre with `nodes_per_panel` nodes on every interval
/// [breaks[i], breaks[i+1]]; `breaks` must be increasing.
QuadratureRule composite_gauss_legendre(const std::vector<double>& breaks, int nodes_per_panel);

/// Breakpoints on [a, b] that grade geometrically away from the end `anchor`
/// (a or b), starting from width `fine` and doubling, then merge with at
/// least `min_panels` uniform panels.
std::vector<double> graded_breaks(double a, double b, double anchor, double fine, int min_panels);

}  // namespace carleman
