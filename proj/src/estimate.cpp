#include "carleman/estimate.hpp"

#include <cmath>
#include <random>

#include "carleman/cutoff.hpp"

namespace carleman {

namespace {

double trapezoid2(const VectorXc& v, double h) {
  const Eigen::Index n = v.size();
  if (n == 0) return 0.0;
  double s = v.cwiseAbs2().sum() - 0.5 * (std::norm(v(0)) + std::norm(v(n - 1)));
  return h * s;
}

VectorXc side_derivative(const VectorXc& v, double h) {
  const Eigen::Index n = v.size();
  const cplx c(0.0, -1.0 / (2.0 * h));
  VectorXc d(n);
  d(0) = c * (-3.0 * v(0) + 4.0 * v(1) - v(2));
  for (Eigen::Index k = 1; k + 1 < n; ++k) d(k) = c * (v(k + 1) - v(k - 1));
  d(n - 1) = c * (3.0 * v(n - 1) - 4.0 * v(n - 2) + v(n - 3));
  return d;
}

}  // namespace

double interface_norm(const Grid1D& g, const InterfaceFunction& v) {
  return std::sqrt(trapezoid2(v.minus, g.h) + trapezoid2(v.plus, g.h));
}

InterfaceFunction interface_derivative(const Grid1D& g, const InterfaceFunction& v) {
  return {side_derivative(v.minus, g.h), side_derivative(v.plus, g.h)};
}

void check_transmission(const AssembledOperator& op, const InterfaceFunction& v,
                        const TransmissionData& data) {
  const Grid1D& g = op.grid;
  if (v.minus.size() != g.minus_nodes() || v.plus.size() != g.plus_nodes()) {
    throw ValidationError("v", "size does not match the grid");
  }
  const cplx vm = v.minus(v.minus.size() - 1), vp = v.plus(0);
  const double jump = std::abs(vp - vm - data.theta);
  const double jump_scale = std::max({std::abs(vp), std::abs(vm), std::abs(data.theta)});
  if (jump > 1e-8 * jump_scale) throw ValidationError("v", "continuity condition violated");
  double flux_scale = std::abs(data.Theta);
  const Eigen::Index im = v.minus.size() - 1;
  for (int k = 0; k < 3; ++k) {
    flux_scale += std::abs(op.flux.plus[k] * v.plus(k)) + std::abs(op.flux.minus[k] * v.minus(im - k));
  }
  if (std::abs(op.flux.apply(v) - data.Theta) > 1e-8 * flux_scale) {
    throw ValidationError("v", "flux condition violated");
  }
}

EstimateSides estimate_sides(const AssembledOperator& op, const InterfaceFunction& v,
                             const TransmissionData& data) {
  check_transmission(op, v, data);
  const Grid1D& g = op.grid;
  const double tau = op.freq.tau;
  const double xi = op.freq.xi_norm();
  const double t32 = std::pow(tau, 1.5), t12 = std::sqrt(tau);

  const VectorXc pv = op.full * v.stacked();
  double pm = 0, pp = 0;
  for (std::size_t r = 0; r < op.row_dof.size(); ++r) {
    (op.row_dof[r] <= g.minus_dof(g.interface_index) ? pm : pp) += std::norm(pv(static_cast<Eigen::Index>(r)));
  }
  EstimateSides out;
  out.lhs = std::sqrt(g.h * pm) + std::sqrt(g.h * pp) + t32 * std::abs(data.theta) +
            t12 * xi * std::abs(data.theta) + t12 * std::abs(data.Theta);

  const InterfaceFunction dv = interface_derivative(g, v);
  const double nv = interface_norm(g, v), ndv = interface_norm(g, dv);
  const double traces = std::abs(v.minus(v.minus.size() - 1)) + std::abs(v.plus(0));
  const double dtraces = std::abs(dv.minus(dv.minus.size() - 1)) + std::abs(dv.plus(0));
  out.rhs = t32 * nv + t12 * (ndv + xi * nv) + t32 * traces + t12 * (dtraces + xi * traces);
  if (out.lhs > 0.0) {
    out.ratio = out.rhs / out.lhs;
  } else {
    out.ratio = out.rhs > 0.0 ? std::numeric_limits<double>::infinity() : 0.0;
  }
  return out;
}

InterfaceFunction random_admissible_v(const AssembledOperator& op, std::uint64_t seed, int smoothing,
                                      const TransmissionData& data) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  const Eigen::Index nfree = op.reduced.cols();
  VectorXc free(nfree);
  for (Eigen::Index k = 0; k < nfree; ++k) free(k) = cplx(normal(rng), normal(rng));

  // Free unknowns are ordered minus side (outer to interface), then plus side
  // (interface to outer).
  const int i0 = op.grid.interface_index;
  Eigen::Index split = 0;
  while (split < nfree && op.free_dof[split] <= op.grid.minus_dof(i0)) ++split;
  auto smooth = [&](Eigen::Index begin, Eigen::Index end, bool outer_first) {
    const Eigen::Index len = end - begin;
    if (len <= 0) return;
    for (int pass = 0; pass < smoothing; ++pass) {
      VectorXc cur = free.segment(begin, len);
      for (Eigen::Index j = 0; j < len; ++j) {
        // Zero beyond the outer end, reflected at the interface end.
        const cplx left = j > 0 ? cur(j - 1) : (outer_first ? cplx(0) : cur(j));
        const cplx right = j + 1 < len ? cur(j + 1) : (outer_first ? cur(j) : cplx(0));
        free(begin + j) = (left + cur(j) + right) / 3.0;
      }
    }
  };
  smooth(0, split, true);
  smooth(split, nfree, false);
  return InterfaceFunction::from_stacked(op.grid, op.lift(free, data));
}

HalfLineCheck halfline_factor_check(double lambda, double gamma, int sign, const VectorXc& omega,
                                    double h) {
  if (omega.size() < 3) throw ValidationError("omega", "need at least 3 samples");
  if (!(h > 0.0)) throw ValidationError("h", "must be positive");
  if (sign != 1 && sign != -1) throw ValidationError("sign", "must be +1 or -1");
  // Forward differences and left-point sums over t_0 .. t_{n-2}.
  const Eigen::Index n = omega.size() - 1;
  const cplx I(0, 1);
  const VectorXc d = -I * (omega.tail(n) - omega.head(n)) / h;  // D_t omega
  VectorXc gw(n);
  for (Eigen::Index k = 0; k < n; ++k) gw(k) = (sign * lambda + gamma * h * k) * omega(k);
  auto sum2 = [h](const VectorXc& v) { return h * v.squaredNorm(); };
  const double w2 = sum2(omega.head(n));
  const double w0 = std::norm(omega(0));

  HalfLineCheck out;
  out.lhs2 = sum2(d + I * gw);
  out.rhs2 = sum2(d) + sum2(gw) + gamma * w2 + sign * lambda * w0;
  out.identity_residual = std::abs(out.lhs2 - out.rhs2);
  out.slack = sign > 0 ? out.lhs2 - lambda * lambda * w2 - lambda * w0
                       : out.lhs2 + lambda * w0 - gamma * w2;
  return out;
}

RandomHalfLineFunction::RandomHalfLineFunction(std::uint64_t seed, double length) : length_(length) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  std::normal_distribution<double> normal;
  const int count = 1 + static_cast<int>(uni(rng) * 4.0);
  for (int k = 0; k < count; ++k) {
    Bump b;
    b.amplitude = cplx(normal(rng), normal(rng));
    b.center = length * uni(rng) * 0.5;
    b.width = length * (0.05 + 0.1 * uni(rng));
    bumps_.push_back(b);
  }
}

cplx RandomHalfLineFunction::operator()(double t) const {
  const double cut = chi0(t / length_).value;
  if (cut == 0.0) return 0.0;
  cplx sum = 0;
  for (const Bump& b : bumps_) {
    const double z = (t - b.center) / b.width;
    sum += b.amplitude * std::exp(-0.5 * z * z);
  }
  return cut * sum;
}

VectorXc RandomHalfLineFunction::sample(int nodes) const {
  VectorXc out(nodes);
  const double h = length_ / (nodes - 1);
  for (int k = 0; k < nodes; ++k) out(k) = (*this)(k * h);
  return out;
}

}  // namespace carleman
