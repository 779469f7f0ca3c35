#pragma once

#include "carleman/discrete.hpp"
#include "carleman/quasimode.hpp"

namespace carleman {

struct DiscreteQuasiModeRatio {
  double tau = 0;
  double ratio_discrete = 0;   // sum_xi w ||L_h u||^2 over sum_xi w ||u||^2, square-rooted
  double ratio_frequency = 0;  // closed-form residual under the same xi quadrature
};

/// Samples the quasi-mode profile of every frequency node on `grid`, applies
/// the direct finite-difference operator and integrates over xi'. The grid
/// must contain the x_n support of every profile.
DiscreteQuasiModeRatio discrete_quasimode_ratio(const QuasiModeSpec& spec,
                                                const ModelCoefficients& coeffs,
                                                const WeightSpec& w, double tau,
                                                const Grid1D& grid, const QuadratureSpec& quad = {});

}  // namespace carleman
