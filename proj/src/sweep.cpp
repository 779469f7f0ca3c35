#include "carleman/sweep.hpp"

#include <algorithm>
#include <cmath>

#include "carleman/parallel.hpp"

namespace carleman {

SweepResult carleman_sweep(const ModelCoefficients& coeffs, const WeightSpec& w,
                           const VectorXd& direction, double ray_ratio,
                           const std::vector<double>& tau_list, const Grid1D& grid,
                           const SweepOptions& options) {
  if (direction.size() != coeffs.dimension() - 1 || !(direction.norm() > 0.0)) {
    throw ValidationError("ray.direction", "must be a nonzero tangential vector");
  }
  if (!(ray_ratio >= 0.0)) throw ValidationError("ray.ratio", "must be nonnegative");
  for (double t : tau_list) {
    if (!(t > 0.0)) throw ValidationError("sweep.tau", "values must be positive");
  }
  const VectorXd dir = direction.normalized();
  std::vector<double> taus = tau_list;
  std::sort(taus.begin(), taus.end());

  SweepResult out;
  out.rows.resize(taus.size());
  parallel_for(taus.size(), options.threads, [&](std::size_t i) {
    const double tau = taus[i];
    const TangentialFrequency freq(tau, VectorXd(ray_ratio * tau * dir));
    const AssembledOperator op = assemble(coeffs, w, freq, grid, options.mode, options.boundary);
    SweepRow row;
    row.tau = tau;
    row.xi_abs = freq.xi_norm();
    row.sigma_min = min_singular_value(op.reduced, options.svd).sigma_min;
    row.sigma_over_tau32 = row.sigma_min / std::pow(tau, 1.5);
    row.n = grid.n;
    row.h = grid.h;
    row.mode = options.mode;
    out.rows[i] = row;
  });
  std::vector<double> x, y;
  for (const auto& r : out.rows) {
    if (r.sigma_min > 0.0) {
      x.push_back(std::log(r.tau));
      y.push_back(std::log(r.sigma_min));
    }
  }
  if (x.size() >= 2) out.fit = linear_fit(x, y);
  return out;
}

}  // namespace carleman
