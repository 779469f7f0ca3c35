#include "carleman/consistency.hpp"

#include <cmath>

#include "carleman/estimate.hpp"

namespace carleman {

DiscreteQuasiModeRatio discrete_quasimode_ratio(const QuasiModeSpec& spec,
                                                const ModelCoefficients& coeffs,
                                                const WeightSpec& w, double tau,
                                                const Grid1D& grid, const QuadratureSpec& quad) {
  const FrequencyNodes fn = support_quadrature(spec, tau, quad);
  const int i0 = grid.interface_index;
  double lu2 = 0, u2 = 0;
  for (std::size_t j = 0; j < fn.xi.size(); ++j) {
    const QuasiModeProfile p(spec, coeffs, w, tau, fn.xi[j]);
    if (!p.active()) continue;
    if (p.plus_extent() >= grid.x_max || p.minus_extent() >= -grid.x_min) {
      throw ValidationError("grid", "does not contain the quasi-mode support");
    }
    InterfaceFunction v{VectorXc(grid.minus_nodes()), VectorXc(grid.plus_nodes())};
    for (int i = 0; i <= i0; ++i) v.minus(i) = p.minus(grid.x(i)).u;
    for (int i = i0; i < grid.n; ++i) v.plus(i - i0) = p.plus(grid.x(i)).u;
    const AssembledOperator op = assemble(coeffs, w, TangentialFrequency(tau, fn.xi[j]), grid);
    const VectorXc lv = op.full * v.stacked();
    const double nu = interface_norm(grid, v);
    lu2 += fn.weights[j] * grid.h * lv.squaredNorm();
    u2 += fn.weights[j] * nu * nu;
  }
  DiscreteQuasiModeRatio out;
  out.tau = tau;
  out.ratio_discrete = u2 > 0.0 ? std::sqrt(lu2 / u2) : 0.0;
  QuadratureSpec q = quad;
  out.ratio_frequency = quasimode_norms_at(spec, coeffs, w, tau, q).ratio;
  return out;
}

}  // namespace carleman
