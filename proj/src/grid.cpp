#include <cmath>

#include "carleman/discrete.hpp"

namespace carleman {

Grid1D make_grid(double x_min, double x_max, int n) {
  if (!(x_min < 0.0)) throw ValidationError("grid.x_min", "must be negative");
  if (!(x_max > 0.0)) throw ValidationError("grid.x_max", "must be positive");
  if (n < 16) throw ValidationError("grid.n", "need at least 16 nodes");
  Grid1D g;
  g.x_min = x_min;
  g.x_max = x_max;
  g.n = n;
  g.h = (x_max - x_min) / (n - 1);
  const double pos = -x_min / g.h;
  const double k = std::round(pos);
  if (std::abs(pos - k) > 1e-9) throw ValidationError("grid.n", "x = 0 is not a grid node");
  g.interface_index = static_cast<int>(k);
  if (g.interface_index < 4 || n - 1 - g.interface_index < 4) {
    throw ValidationError("grid.n", "each side needs at least 4 intervals");
  }
  return g;
}

VectorXc InterfaceFunction::stacked() const {
  VectorXc full(minus.size() + plus.size());
  full << minus, plus;
  return full;
}

InterfaceFunction InterfaceFunction::from_stacked(const Grid1D& g, const VectorXc& full) {
  if (full.size() != g.dof()) throw ValidationError("v", "size does not match the grid");
  return {full.head(g.minus_nodes()), full.tail(g.plus_nodes())};
}

const char* to_string(AssemblyMode mode) {
  return mode == AssemblyMode::Direct ? "direct" : "factored";
}

}  // namespace carleman
