#include <algorithm>
#include <cmath>
#include <numbers>

#include "carleman/cutoff.hpp"
#include "carleman/quasimode.hpp"

namespace carleman {

namespace {

// Frequency-side tables for one tau: rows are xi nodes, columns x_n nodes.
struct FrequencyTables {
  VectorXd xi, xi_w;
  MatrixXc u, residual, xi_u, pu;  // u, M u, xi u, (D_n + i tau phi') u
};

struct SideTraces {
  VectorXc u, xi_u, pu;  // at x_n = 0 from one side, per xi node
};

struct Evaluated {
  MatrixXc v, lv;  // physical v and L v on (x_n, x')
};

QuadratureRule uniform(double a, double b, int nodes, int panel_nodes) {
  const int panels = std::max(1, nodes / panel_nodes);
  std::vector<double> breaks;
  for (int j = 0; j <= panels; ++j) breaks.push_back(a + (b - a) * j / panels);
  return composite_gauss_legendre(breaks, panel_nodes);
}

QuadratureRule xn_rule(const std::vector<QuasiModeProfile>& profiles, const QuadratureSpec& quad) {
  double plus = 0, minus = 0, f_max = 0, e_max = 0;
  for (const auto& p : profiles) {
    if (!p.active()) continue;
    plus = std::max(plus, p.plus_extent());
    minus = std::max(minus, p.minus_extent());
    f_max = std::max(f_max, -p.f_plus0());
    e_max = std::max(e_max, p.e_minus0());
  }
  const int panels = std::max(2, 2 * quad.xn_nodes / quad.panel_nodes);
  QuadratureRule rule;
  std::vector<double> mb = graded_breaks(-minus, 0.0, 0.0, 0.5 / e_max, panels);
  rule.append(composite_gauss_legendre(mb, quad.panel_nodes));
  std::vector<double> pb = graded_breaks(0.0, plus, 0.0, 0.5 / f_max, panels);
  rule.append(composite_gauss_legendre(pb, quad.panel_nodes));
  return rule;
}

FrequencyTables tabulate(const std::vector<QuasiModeProfile>& profiles, const QuadratureRule& xi_rule,
                         const std::vector<double>& xn, const WeightSpec& w, double tau) {
  const Eigen::Index nx = static_cast<Eigen::Index>(xi_rule.size());
  const Eigen::Index nn = static_cast<Eigen::Index>(xn.size());
  FrequencyTables t;
  t.xi = Eigen::Map<const VectorXd>(xi_rule.nodes.data(), nx);
  t.xi_w = Eigen::Map<const VectorXd>(xi_rule.weights.data(), nx);
  t.u = t.residual = t.xi_u = t.pu = MatrixXc::Zero(nx, nn);
  const cplx I(0, 1);
  for (Eigen::Index j = 0; j < nx; ++j) {
    const auto& p = profiles[j];
    if (!p.active()) continue;
    for (Eigen::Index i = 0; i < nn; ++i) {
      const double x = xn[i];
      const QuasiModeSample s = p.at(x);
      const double slope = w.slope(x >= 0.0, x);
      t.u(j, i) = s.u;
      t.residual(j, i) = s.residual;
      t.xi_u(j, i) = t.xi(j) * s.u;
      t.pu(j, i) = -I * s.du + I * tau * slope * s.u;
    }
  }
  return t;
}

SideTraces traces(const std::vector<QuasiModeProfile>& profiles, const VectorXd& xi,
                  const WeightSpec& w, double tau, bool plus_side) {
  const Eigen::Index nx = xi.size();
  SideTraces t{VectorXc::Zero(nx), VectorXc::Zero(nx), VectorXc::Zero(nx)};
  const cplx I(0, 1);
  const double slope = plus_side ? w.alpha_plus : w.alpha_minus;
  for (Eigen::Index j = 0; j < nx; ++j) {
    const QuasiModeSample s = plus_side ? profiles[j].plus(0.0) : profiles[j].minus(0.0);
    t.u(j) = s.u;
    t.xi_u(j) = xi(j) * s.u;
    t.pu(j) = -I * s.du + I * tau * slope * s.u;
  }
  return t;
}

// (2 pi)^{-1} w_j e^{i x' xi_j}: rows x', cols xi.
MatrixXc inverse_kernel(const std::vector<double>& xp, const VectorXd& xi, const VectorXd& xi_w) {
  MatrixXc e(static_cast<Eigen::Index>(xp.size()), xi.size());
  for (Eigen::Index r = 0; r < e.rows(); ++r) {
    for (Eigen::Index c = 0; c < e.cols(); ++c) {
      e(r, c) = std::polar(xi_w(c) / (2.0 * std::numbers::pi), xp[r] * xi(c));
    }
  }
  return e;
}

// v and L v at points (x_n[i], x'[r]).
Evaluated evaluate(const FrequencyTables& t, const std::vector<double>& xp,
                   const std::vector<double>& xn, const ModelCoefficients& coeffs, double tau) {
  const MatrixXc e = inverse_kernel(xp, t.xi, t.xi_w);
  const MatrixXc wu = (e * t.u).transpose();
  const MatrixXc wr = (e * t.residual).transpose();
  const MatrixXc wxu = (e * t.xi_u).transpose();
  const MatrixXc wpu = (e * t.pu).transpose();
  const double rt = std::sqrt(tau);
  const cplx I(0, 1);
  Evaluated out{MatrixXc::Zero(wu.rows(), wu.cols()), MatrixXc::Zero(wu.rows(), wu.cols())};
  for (Eigen::Index c = 0; c < wu.cols(); ++c) {
    const CutoffValue chi = chi0(rt * xp[c]);
    const cplx d1 = -I * rt * chi.d1;  // D_1 chi
    const double d2 = -tau * chi.d2;   // D_1^2 chi
    for (Eigen::Index r = 0; r < wu.rows(); ++r) {
      const MatrixXd& a = xn[r] >= 0.0 ? coeffs.a_plus : coeffs.a_minus;
      out.v(r, c) = chi.value * wu(r, c);
      out.lv(r, c) = chi.value * wr(r, c) + a(0, 0) * (2.0 * d1 * wxu(r, c) + d2 * wu(r, c)) +
                     2.0 * a(0, 1) * d1 * wpu(r, c);
    }
  }
  return out;
}

struct PhysicalNorms {
  double v = 0, lv = 0;
};

PhysicalNorms physical_norms(const QuasiModeSpec& spec, const ModelCoefficients& coeffs,
                             const WeightSpec& w, double tau, const QuadratureSpec& quad) {
  const auto [lo, hi] = conic_support_box(spec, tau);
  const QuadratureRule xi_rule = uniform(lo(0), hi(0), quad.xi_nodes, quad.panel_nodes);
  std::vector<QuasiModeProfile> profiles;
  profiles.reserve(xi_rule.size());
  for (double x : xi_rule.nodes) profiles.emplace_back(spec, coeffs, w, tau, VectorXd::Constant(1, x));
  const QuadratureRule xn = xn_rule(profiles, quad);
  const double half = 1.0 / std::sqrt(tau);
  const QuadratureRule xp = uniform(-half, half, quad.xi_nodes, quad.panel_nodes);
  const FrequencyTables t = tabulate(profiles, xi_rule, xn.nodes, w, tau);
  const Evaluated ev = evaluate(t, xp.nodes, xn.nodes, coeffs, tau);
  const Eigen::Map<const VectorXd> wn(xn.weights.data(), static_cast<Eigen::Index>(xn.size()));
  const Eigen::Map<const VectorXd> wp(xp.weights.data(), static_cast<Eigen::Index>(xp.size()));
  PhysicalNorms out;
  out.v = std::sqrt(wn.transpose() * ev.v.cwiseAbs2() * wp);
  out.lv = std::sqrt(wn.transpose() * ev.lv.cwiseAbs2() * wp);
  return out;
}

}  // namespace

PhysicalQuasiMode build_physical_v(const QuasiModeSpec& spec, const ModelCoefficients& coeffs,
                                   const WeightSpec& w, double tau, const PhysicalGrid& grid,
                                   const QuadratureSpec& quad) {
  coeffs.validate();
  w.validate();
  if (coeffs.dimension() != 2) throw ValidationError("coefficients", "physical quasi-mode needs n = 2");

  PhysicalNorms norms = physical_norms(spec, coeffs, w, tau, quad);
  if (quad.check_convergence) {
    QuadratureSpec fine = quad;
    fine.xi_nodes *= 2;
    fine.xn_nodes *= 2;
    const PhysicalNorms n2 = physical_norms(spec, coeffs, w, tau, fine);
    const double r1 = norms.lv / norms.v, r2 = n2.lv / n2.v;
    const double change = std::abs(r1 - r2) / std::max(std::abs(r1), std::abs(r2));
    if (change > quad.convergence_tol) {
      throw ConvergenceError("build_physical_v",
                             "ratio changed by " + std::to_string(change) + " under doubling");
    }
    norms = n2;
  }

  PhysicalQuasiMode out;
  out.norm_v = norms.v;
  out.norm_Lv = norms.lv;
  out.ratio_physical = norms.v > 0.0 ? norms.lv / norms.v : 0.0;
  QuadratureSpec freq_quad = quad;
  out.ratio_frequency = quasimode_norms_at(spec, coeffs, w, tau, freq_quad).ratio;

  if (grid.x_prime.empty() || grid.x_n.empty()) return out;

  const auto [lo, hi] = conic_support_box(spec, tau);
  const QuadratureRule xi_rule = uniform(lo(0), hi(0), 2 * quad.xi_nodes, quad.panel_nodes);
  std::vector<QuasiModeProfile> profiles;
  profiles.reserve(xi_rule.size());
  for (double x : xi_rule.nodes) profiles.emplace_back(spec, coeffs, w, tau, VectorXd::Constant(1, x));
  const FrequencyTables t = tabulate(profiles, xi_rule, grid.x_n, w, tau);
  const Evaluated ev = evaluate(t, grid.x_prime, grid.x_n, coeffs, tau);
  out.v = ev.v;
  out.max_abs_v = ev.v.cwiseAbs().maxCoeff();

  const double rt = std::sqrt(tau);
  for (std::size_t c = 0; c < grid.x_prime.size(); ++c) {
    if (rt * std::abs(grid.x_prime[c]) >= 1.0 && ev.v.col(static_cast<Eigen::Index>(c)).cwiseAbs().maxCoeff() != 0.0) {
      out.support_ok = false;
    }
  }

  // Interface traces: continuity of v and of the conormal flux
  // a_21 D_1 v + a_22 (D_n + i tau phi') v.
  const SideTraces tp = traces(profiles, t.xi, w, tau, true);
  const SideTraces tm = traces(profiles, t.xi, w, tau, false);
  const MatrixXc e = inverse_kernel(grid.x_prime, t.xi, t.xi_w);
  const VectorXc up = e * tp.u, um = e * tm.u;
  const VectorXc xup = e * tp.xi_u, xum = e * tm.xi_u;
  const VectorXc pup = e * tp.pu, pum = e * tm.pu;
  const cplx I(0, 1);
  for (std::size_t c = 0; c < grid.x_prime.size(); ++c) {
    const auto k = static_cast<Eigen::Index>(c);
    const CutoffValue chi = chi0(rt * grid.x_prime[c]);
    const cplx d1 = -I * rt * chi.d1;
    out.continuity_error = std::max(out.continuity_error, std::abs(chi.value * (up(k) - um(k))));
    auto flux = [&](const MatrixXd& a, cplx u, cplx xu, cplx pu) {
      return a(1, 0) * (chi.value * xu + d1 * u) + a(1, 1) * chi.value * pu;
    };
    const cplx fp = flux(coeffs.a_plus, up(k), xup(k), pup(k));
    const cplx fm = flux(coeffs.a_minus, um(k), xum(k), pum(k));
    out.flux_error = std::max(out.flux_error, std::abs(fp - fm));
    out.flux_scale = std::max(out.flux_scale, std::abs(fp));
  }
  return out;
}

}  // namespace carleman
