#pragma once

#include <vector>

#include "carleman/discrete.hpp"
#include "carleman/fit.hpp"
#include "carleman/singular_value.hpp"

namespace carleman {

struct SweepOptions {
  AssemblyMode mode = AssemblyMode::Direct;
  OuterBoundary boundary = OuterBoundary::Clamped;
  int threads = 1;
  SingularValueOptions svd;
};

struct SweepRow {
  double tau = 0;
  double xi_abs = 0;
  double sigma_min = 0;
  double sigma_over_tau32 = 0;
  int n = 0;
  double h = 0;
  AssemblyMode mode = AssemblyMode::Direct;
};

struct SweepResult {
  std::vector<SweepRow> rows;  // sorted by tau
  LinearFit fit;               // log sigma_min against log tau
};

/// sigma_min of the reduced operator along the ray xi' = ray_ratio * tau * direction.
SweepResult carleman_sweep(const ModelCoefficients& coeffs, const WeightSpec& w,
                           const VectorXd& direction, double ray_ratio,
                           const std::vector<double>& tau_list, const Grid1D& grid,
                           const SweepOptions& options = {});

}  // namespace carleman
