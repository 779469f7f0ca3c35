#include "carleman/quasimode.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "carleman/cutoff.hpp"
#include "carleman/parallel.hpp"

namespace carleman {

std::optional<ViolationPoint> find_violation(const ModelCoefficients& coeffs, const WeightSpec& w) {
  const ConditionReport report = check_condition(coeffs, w);
  if (report.satisfied) return std::nullopt;
  const ReducedCoefficients rp = reduce_coefficients(coeffs.a_plus);
  const ReducedCoefficients rm = reduce_coefficients(coeffs.a_minus);
  const VectorXd& d = report.witness;
  const double lo = tangential_symbol(rm, d) / w.alpha_minus;
  const double hi = tangential_symbol(rp, d) / w.alpha_plus;
  if (!(lo < hi)) return std::nullopt;  // equality: no open violating cone
  const double tau = 0.5 * (lo + hi);
  const double norm = std::sqrt(tau * tau + 1.0);
  return ViolationPoint{tau / norm, d / norm};
}

InterfaceCoefficients ab_coefficients(const ModelCoefficients& coeffs, const VectorXd& xi) {
  const ReducedCoefficients rp = reduce_coefficients(coeffs.a_plus);
  const ReducedCoefficients rm = reduce_coefficients(coeffs.a_minus);
  const double mp = tangential_symbol(rp, xi);
  const double mm = tangential_symbol(rm, xi);
  if (!(mm > 0.0)) throw ValidationError("xi", "tangential frequency must be nonzero");
  InterfaceCoefficients ab;
  ab.a = 0.5 * (1.0 + rp.a_nn * mp / (rm.a_nn * mm));
  ab.b = 1.0 - ab.a;
  return ab;
}

double conic_cutoff(const QuasiModeSpec& spec, double tau, const VectorXd& xi) {
  const double lambda = std::sqrt(tau * tau + xi.squaredNorm());
  if (lambda == 0.0) return 0.0;
  const double r = spec.cutoff_radius;
  const double t = chi1(tau / lambda - spec.violation.tau0, r).value;
  if (t == 0.0) return 0.0;
  return t * chi1((xi / lambda - spec.violation.xi0).norm(), r).value;
}

QuasiModeProfile::QuasiModeProfile(const QuasiModeSpec& spec, const ModelCoefficients& coeffs,
                                   const WeightSpec& w, double tau, const VectorXd& xi)
    : tau_(tau), beta_(w.beta) {
  if (!(w.beta > 0.0)) throw ValidationError("weight.beta", "quasi-mode needs beta > 0");
  if (!(spec.gamma >= 1.0)) throw ValidationError("gamma", "must be >= 1");
  if (!(tau > 0.0)) throw ValidationError("tau", "must be positive");
  psi_ = conic_cutoff(spec, tau, xi);
  if (psi_ == 0.0) return;

  const ReducedCoefficients rp = reduce_coefficients(coeffs.a_plus);
  const ReducedCoefficients rm = reduce_coefficients(coeffs.a_minus);
  a_plus_ = rp.a_nn;
  a_minus_ = rm.a_nn;
  s_plus_ = tangential_shift(rp, xi);
  s_minus_ = tangential_shift(rm, xi);
  m_plus_ = tangential_symbol(rp, xi);
  m_minus_ = tangential_symbol(rm, xi);
  f_plus_ = tau * w.alpha_plus - m_plus_;
  f_minus_ = tau * w.alpha_minus - m_minus_;
  e_minus_ = tau * w.alpha_minus + m_minus_;
  if (!(f_plus_ < 0.0) || !(f_minus_ > 0.0)) {
    throw ValidationError("xi", "frequency in the cut-off support but outside the violating cone");
  }
  const double scale = tau * w.beta * spec.gamma;
  k_plus_ = scale / -f_plus_;
  k_f_ = scale / f_minus_;
  k_e_ = scale / e_minus_;
  ab_.a = 0.5 * (1.0 + a_plus_ * m_plus_ / (a_minus_ * m_minus_));
  ab_.b = 1.0 - ab_.a;
}

QuasiModeSample QuasiModeProfile::plus(double x) const {
  QuasiModeSample out{};
  if (!active() || x * k_plus_ >= 1.0) return out;
  const cplx q = std::exp(cplx(x * (f_plus_ + 0.5 * tau_ * beta_ * x), -s_plus_ * x));
  const cplx dq = cplx(f_plus_ + tau_ * beta_ * x, -s_plus_) * q;
  const CutoffValue c = chi0(k_plus_ * x);
  const double k = k_plus_;
  out.u = psi_ * q * c.value;
  out.du = psi_ * (dq * c.value + q * k * c.d1);
  out.residual = psi_ * a_plus_ * q * (2.0 * k * m_plus_ * c.d1 - k * k * c.d2);
  return out;
}

QuasiModeSample QuasiModeProfile::minus(double x) const {
  QuasiModeSample out{};
  if (!active() || -x * k_e_ >= 1.0) return out;
  const double tb = tau_ * beta_;
  const cplx rot(0.0, -s_minus_ * x);
  const CutoffValue cf = chi0(k_f_ * x);
  const CutoffValue ce = chi0(k_e_ * x);
  cplx u(0), du(0), res(0);
  if (cf.value != 0.0 || cf.d1 != 0.0 || cf.d2 != 0.0) {
    const cplx q = std::exp(x * (f_minus_ + 0.5 * tb * x) + rot);
    const cplx dq = cplx(f_minus_ + tb * x, -s_minus_) * q;
    const double k = k_f_;
    u += ab_.a * q * cf.value;
    du += ab_.a * (dq * cf.value + q * k * cf.d1);
    res += ab_.a * q * (2.0 * k * m_minus_ * cf.d1 - k * k * cf.d2);
  }
  const cplx q = std::exp(x * (e_minus_ + 0.5 * tb * x) + rot);
  const cplx dq = cplx(e_minus_ + tb * x, -s_minus_) * q;
  const double k = k_e_;
  u += ab_.b * q * ce.value;
  du += ab_.b * (dq * ce.value + q * k * ce.d1);
  res += ab_.b * q * (-2.0 * k * m_minus_ * ce.d1 - k * k * ce.d2);
  out.u = psi_ * u;
  out.du = psi_ * du;
  out.residual = psi_ * a_minus_ * res;
  return out;
}

double QuasiModeProfile::norm2_lower_bound() const {
  if (!active()) return 0.0;
  const double scale = k_plus_ * -f_plus_;  // tau beta gamma
  const double fp2 = f_plus_ * f_plus_, fm2 = f_minus_ * f_minus_;
  const double plus = (1.0 - std::exp(-fp2 / scale)) / (2.0 * -f_plus_);
  const double minus = (1.0 - std::exp(-fm2 / scale)) / (8.0 * f_minus_);
  return psi_ * psi_ * (plus + minus);
}

double QuasiModeProfile::residual2_upper_bound() const {
  if (!active()) return 0.0;
  const CutoffBounds& cb = chi0_bounds();
  const double c1 = cb.d1_sup * cb.d1_sup, c2 = cb.d2_sup * cb.d2_sup;
  const double scale = k_plus_ * -f_plus_;  // tau beta gamma
  auto piece = [&](double k, double m, double g) {
    return k * (4.0 * m * m * c1 + k * k * c2) * std::exp(-g * g / (2.0 * scale));
  };
  const double plus = a_plus_ * a_plus_ * piece(k_plus_, m_plus_, f_plus_);
  const double minus = a_minus_ * a_minus_ *
                       (2.0 * ab_.a * ab_.a * piece(k_f_, m_minus_, f_minus_) +
                        2.0 * ab_.b * ab_.b * piece(k_e_, m_minus_, e_minus_));
  return psi_ * psi_ * (plus + minus);
}

QuasiModeSample eval_quasimode(const QuasiModeSpec& spec, const ModelCoefficients& coeffs,
                               const WeightSpec& w, double tau, const VectorXd& xi, double x_n) {
  return QuasiModeProfile(spec, coeffs, w, tau, xi).at(x_n);
}

std::pair<VectorXd, VectorXd> conic_support_box(const QuasiModeSpec& spec, double tau) {
  const VectorXd& c = spec.violation.xi0;
  const double r = spec.cutoff_radius;
  const double outer = c.norm() + r;
  if (!(outer < 1.0)) throw ValidationError("cutoff_radius", "cut-off support reaches tau = 0");
  const double c_lo = std::sqrt(1.0 - outer * outer);
  VectorXd lo(c.size()), hi(c.size());
  for (Eigen::Index k = 0; k < c.size(); ++k) {
    const double el = c(k) - r, eh = c(k) + r;
    lo(k) = tau * std::min(el, el / c_lo);
    hi(k) = tau * std::max(eh, eh / c_lo);
  }
  return {lo, hi};
}

QuadratureRule profile_xn_rule(const QuasiModeProfile& p, bool plus_side, const QuadratureSpec& quad) {
  const int per_piece = std::max(1, quad.xn_nodes / quad.panel_nodes);
  std::vector<double> pieces;
  double extent, fine;
  if (plus_side) {
    extent = p.plus_extent();
    pieces = {0.0, 0.5 * extent, extent};
    fine = 0.5 / -p.f_plus0();
  } else {
    extent = p.minus_extent();
    const double sf = p.minus_f_extent();
    pieces = {0.0, 0.5 * sf, sf, 0.5 * extent, extent};
    std::sort(pieces.begin(), pieces.end());
    fine = 0.5 / p.e_minus0();
  }
  std::vector<double> breaks;
  for (std::size_t i = 0; i + 1 < pieces.size(); ++i) {
    const double a = pieces[i], b = pieces[i + 1];
    if (!(b > a)) continue;
    for (int j = 0; j < per_piece; ++j) breaks.push_back(a + (b - a) * j / per_piece);
  }
  breaks.push_back(extent);
  for (double d = fine; d < extent; d *= 2.0) breaks.push_back(d);
  std::sort(breaks.begin(), breaks.end());
  breaks.erase(std::unique(breaks.begin(), breaks.end(),
                           [&](double x, double y) { return std::abs(x - y) <= 1e-14 * extent; }),
               breaks.end());
  if (!plus_side) {
    for (double& b : breaks) b = -b;
    std::reverse(breaks.begin(), breaks.end());
  }
  return composite_gauss_legendre(breaks, quad.panel_nodes);
}

namespace {

std::vector<VectorXd> tensor_nodes(const std::vector<QuadratureRule>& rules, std::vector<double>& weights) {
  std::vector<VectorXd> nodes;
  weights.clear();
  const int dim = static_cast<int>(rules.size());
  std::vector<std::size_t> idx(dim, 0);
  while (true) {
    VectorXd x(dim);
    double wt = 1.0;
    for (int k = 0; k < dim; ++k) {
      x(k) = rules[k].nodes[idx[k]];
      wt *= rules[k].weights[idx[k]];
    }
    nodes.push_back(x);
    weights.push_back(wt);
    int k = 0;
    for (; k < dim; ++k) {
      if (++idx[k] < rules[k].size()) break;
      idx[k] = 0;
    }
    if (k == dim) break;
  }
  return nodes;
}

QuadratureRule uniform_rule(double a, double b, int nodes, int panel_nodes) {
  const int panels = std::max(1, nodes / panel_nodes);
  std::vector<double> breaks;
  for (int j = 0; j <= panels; ++j) breaks.push_back(a + (b - a) * j / panels);
  return composite_gauss_legendre(breaks, panel_nodes);
}

}  // namespace

FrequencyNodes support_quadrature(const QuasiModeSpec& spec, double tau, const QuadratureSpec& quad) {
  const auto [lo, hi] = conic_support_box(spec, tau);
  std::vector<QuadratureRule> rules;
  for (Eigen::Index k = 0; k < lo.size(); ++k) {
    rules.push_back(uniform_rule(lo(k), hi(k), quad.xi_nodes, quad.panel_nodes));
  }
  FrequencyNodes out;
  out.xi = tensor_nodes(rules, out.weights);
  return out;
}

namespace {

QuasiModeEval norms_once(const QuasiModeSpec& spec, const ModelCoefficients& coeffs,
                         const WeightSpec& w, double tau, const QuadratureSpec& quad) {
  const FrequencyNodes fn = support_quadrature(spec, tau, quad);
  const std::vector<VectorXd>& xi_nodes = fn.xi;
  const std::vector<double>& xi_w = fn.weights;

  QuasiModeEval out;
  out.tau = tau;
  double u2 = 0, r2 = 0;
  for (std::size_t j = 0; j < xi_nodes.size(); ++j) {
    const QuasiModeProfile p(spec, coeffs, w, tau, xi_nodes[j]);
    if (!p.active()) continue;
    double pu = 0, pr = 0;
    for (bool side : {true, false}) {
      const QuadratureRule rule = profile_xn_rule(p, side, quad);
      for (std::size_t i = 0; i < rule.size(); ++i) {
        const QuasiModeSample s = side ? p.plus(rule.nodes[i]) : p.minus(rule.nodes[i]);
        pu += rule.weights[i] * std::norm(s.u);
        pr += rule.weights[i] * std::norm(s.residual);
      }
    }
    u2 += xi_w[j] * pu;
    r2 += xi_w[j] * pr;
    out.lower_bound_u2 += xi_w[j] * p.norm2_lower_bound();
    out.upper_bound_residual2 += xi_w[j] * p.residual2_upper_bound();
    if (quad.keep_samples) out.samples.push_back({xi_nodes[j], p.psi(), pu, pr});
  }
  out.norm_u = std::sqrt(u2);
  out.norm_residual = std::sqrt(r2);
  out.ratio = out.norm_u > 0.0 ? out.norm_residual / out.norm_u : 0.0;
  return out;
}

double rel_change(double a, double b) {
  const double s = std::max(std::abs(a), std::abs(b));
  return s == 0.0 ? 0.0 : std::abs(a - b) / s;
}

QuadratureSpec doubled(QuadratureSpec q) {
  q.xi_nodes *= 2;
  q.xn_nodes *= 2;
  return q;
}

}  // namespace

QuasiModeEval quasimode_norms_at(const QuasiModeSpec& spec, const ModelCoefficients& coeffs,
                                 const WeightSpec& w, double tau, const QuadratureSpec& quad) {
  coeffs.validate();
  w.validate();
  if (quad.xi_nodes < 1 || quad.xn_nodes < 1 || quad.panel_nodes < 1) {
    throw ValidationError("quadrature", "node counts must be positive");
  }
  QuasiModeEval base = norms_once(spec, coeffs, w, tau, quad);
  if (!(base.norm_u > 0.0)) {
    throw ValidationError("violation", "cut-off support contains no quadrature node");
  }
  if (!quad.check_convergence) return base;
  QuasiModeEval fine = norms_once(spec, coeffs, w, tau, doubled(quad));
  const double change = std::max(rel_change(base.norm_u, fine.norm_u),
                                 rel_change(base.norm_residual, fine.norm_residual));
  if (change > quad.convergence_tol) {
    throw ConvergenceError("quasimode_norms",
                           "quadrature changed by " + std::to_string(change) +
                               " under doubling at tau = " + std::to_string(tau));
  }
  return fine;
}

QuasiModeSweep quasimode_norms(const QuasiModeSpec& spec, const ModelCoefficients& coeffs,
                               const WeightSpec& w, const std::vector<double>& tau_list,
                               const QuadratureSpec& quad, int threads) {
  std::vector<double> taus = tau_list;
  std::sort(taus.begin(), taus.end());
  QuasiModeSweep out;
  out.rows.resize(taus.size());
  parallel_for(taus.size(), threads,
               [&](std::size_t i) { out.rows[i] = quasimode_norms_at(spec, coeffs, w, taus[i], quad); });
  if (out.rows.size() >= 2) {
    std::vector<double> x, y;
    for (const auto& r : out.rows) {
      if (r.ratio > 0.0) {
        x.push_back(r.tau);
        y.push_back(std::log(r.ratio));
      }
    }
    if (x.size() >= 2) out.fit = linear_fit(x, y);
  }
  return out;
}

}  // namespace carleman
