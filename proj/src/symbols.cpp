#include "carleman/symbols.hpp"

#include <algorithm>
#include <limits>
#include <numbers>
#include <random>

namespace carleman {

namespace {

constexpr double kSymmetryTol = 1e-12;

void check_spd(const MatrixXd& a, const std::string& field) {
  if (a.rows() != a.cols() || a.rows() < 2) {
    throw ValidationError(field, "expected a square matrix of dimension >= 2");
  }
  if (!a.allFinite()) throw ValidationError(field, "non-finite entry");
  const double scale = std::max(1.0, a.cwiseAbs().maxCoeff());
  if ((a - a.transpose()).cwiseAbs().maxCoeff() > kSymmetryTol * scale) {
    throw ValidationError(field, "matrix is not symmetric");
  }
  Eigen::SelfAdjointEigenSolver<MatrixXd> eig(a, Eigen::EigenvaluesOnly);
  if (eig.eigenvalues().minCoeff() <= 0.0) {
    throw ValidationError(field, "matrix is not positive-definite");
  }
}

// Canonical sign: largest-magnitude component positive.
VectorXd canonical_direction(VectorXd v) {
  v.normalize();
  Eigen::Index k;
  v.cwiseAbs().maxCoeff(&k);
  if (v(k) < 0) v = -v;
  return v;
}

std::vector<VectorXd> sphere_samples(int dim, int count) {
  std::vector<VectorXd> out;
  if (dim == 1) {
    out.push_back(VectorXd::Ones(1));
    return out;
  }
  out.reserve(count);
  if (dim == 2) {
    for (int k = 0; k < count; ++k) {
      const double th = std::numbers::pi * k / count;  // half circle suffices: m is even
      VectorXd v(2);
      v << std::cos(th), std::sin(th);
      out.push_back(v);
    }
    return out;
  }
  if (dim == 3) {
    const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
    for (int k = 0; k < count; ++k) {
      const double z = 1.0 - 2.0 * (k + 0.5) / count;
      const double r = std::sqrt(1.0 - z * z);
      VectorXd v(3);
      v << r * std::cos(golden * k), r * std::sin(golden * k), z;
      out.push_back(v);
    }
    return out;
  }
  std::mt19937_64 gen(0);
  std::normal_distribution<double> normal;
  for (int k = 0; k < count; ++k) {
    VectorXd v(dim);
    for (int j = 0; j < dim; ++j) v(j) = normal(gen);
    out.push_back(v.normalized());
  }
  return out;
}

}  // namespace

ModelCoefficients ModelCoefficients::diagonal(const VectorXd& c_plus, const VectorXd& c_minus) {
  if (c_plus.size() != c_minus.size()) {
    throw ValidationError("coefficients", "diagonal vectors differ in length");
  }
  return {c_plus.asDiagonal().toDenseMatrix(), c_minus.asDiagonal().toDenseMatrix()};
}

ModelCoefficients ModelCoefficients::isotropic(int n, double c_plus, double c_minus) {
  return {c_plus * MatrixXd::Identity(n, n), c_minus * MatrixXd::Identity(n, n)};
}

void ModelCoefficients::validate() const {
  check_spd(a_plus, "coefficients.plus");
  check_spd(a_minus, "coefficients.minus");
  if (a_plus.rows() != a_minus.rows()) {
    throw ValidationError("coefficients", "plus and minus matrices differ in dimension");
  }
}

void WeightSpec::validate() const {
  if (!(alpha_plus > 0.0) || !std::isfinite(alpha_plus)) {
    throw ValidationError("weight.alpha_plus", "must be a positive finite number");
  }
  if (!(alpha_minus > 0.0) || !std::isfinite(alpha_minus)) {
    throw ValidationError("weight.alpha_minus", "must be a positive finite number");
  }
  if (!(beta >= 0.0) || !std::isfinite(beta)) {
    throw ValidationError("weight.beta", "must be a nonnegative finite number");
  }
}

TangentialFrequency::TangentialFrequency(double tau_, VectorXd xi_) : tau(tau_), xi(std::move(xi_)) {}

TangentialFrequency::TangentialFrequency(double tau_, double xi_1) : tau(tau_), xi(1) { xi(0) = xi_1; }

void TangentialFrequency::validate() const {
  if (!(tau > 0.0) || !std::isfinite(tau)) throw ValidationError("tau", "must be positive and finite");
  if (!xi.allFinite()) throw ValidationError("xi", "non-finite component");
}

const char* to_string(RegionLabel label) {
  switch (label) {
    case RegionLabel::GammaOnly: return "GammaOnly";
    case RegionLabel::TildeOnly: return "TildeOnly";
    case RegionLabel::Both: return "Both";
  }
  return "?";
}

ReducedCoefficients reduce_coefficients(const MatrixXd& a) {
  check_spd(a, "matrix");
  const Eigen::Index n = a.rows();
  const Eigen::Index k = n - 1;
  ReducedCoefficients red;
  red.a_nn = a(k, k);
  red.t = a.row(k).head(k).transpose() / red.a_nn;
  red.b = a.topLeftCorner(k, k) - a.col(k).head(k) * a.row(k).head(k) / red.a_nn;
  red.b = 0.5 * (red.b + red.b.transpose());
  return red;
}

double tangential_symbol(const ReducedCoefficients& red, const VectorXd& xi) {
  return std::sqrt(std::max(0.0, tangential_form<double>(red, xi)));
}

SymbolValues symbol_values(const ReducedCoefficients& red_plus,
                           const ReducedCoefficients& red_minus, const WeightSpec& w,
                           const TangentialFrequency& freq, double x_n) {
  freq.validate();
  if (!std::isfinite(x_n)) throw ValidationError("x_n", "must be finite");
  SymbolValues s;
  s.m_plus = tangential_symbol(red_plus, freq.xi);
  s.m_minus = tangential_symbol(red_minus, freq.xi);
  s.s_plus = tangential_shift(red_plus, freq.xi);
  s.s_minus = tangential_shift(red_minus, freq.xi);
  s.phi_prime_plus = w.slope(true, x_n);
  s.phi_prime_minus = w.slope(false, x_n);
  s.e_plus = freq.tau * s.phi_prime_plus + s.m_plus;
  s.f_plus = freq.tau * s.phi_prime_plus - s.m_plus;
  s.e_minus = freq.tau * s.phi_prime_minus + s.m_minus;
  s.f_minus = freq.tau * s.phi_prime_minus - s.m_minus;
  return s;
}

SupRatio sup_m_ratio(const ReducedCoefficients& red_plus, const ReducedCoefficients& red_minus) {
  const MatrixXd p = red_plus.b / red_plus.a_nn;
  const MatrixXd q = red_minus.b / red_minus.a_nn;
  Eigen::LLT<MatrixXd> llt(q);
  if (llt.info() != Eigen::Success) {
    throw ValidationError("coefficients.minus", "tangential form is not positive-definite");
  }
  const MatrixXd l = llt.matrixL();
  // C = L^{-1} P L^{-T}
  const MatrixXd linv_p = l.triangularView<Eigen::Lower>().solve(p);
  const MatrixXd c = l.triangularView<Eigen::Lower>().solve(linv_p.transpose());
  Eigen::SelfAdjointEigenSolver<MatrixXd> eig(0.5 * (c + c.transpose()));
  const Eigen::Index top = c.rows() - 1;
  const VectorXd y = eig.eigenvectors().col(top);
  const VectorXd xi = l.transpose().triangularView<Eigen::Upper>().solve(y);
  return {std::sqrt(std::max(0.0, eig.eigenvalues()(top))), canonical_direction(xi)};
}

SupRatio sup_m_ratio_sampled(const ReducedCoefficients& red_plus,
                             const ReducedCoefficients& red_minus, int samples) {
  const int dim = red_plus.tangential_dimension();
  if (dim > 3) throw ValidationError("dimension", "sphere sampling supports n - 1 <= 3");
  SupRatio best{-1.0, VectorXd()};
  for (const VectorXd& v : sphere_samples(dim, samples)) {
    const double r = tangential_symbol(red_plus, v) / tangential_symbol(red_minus, v);
    if (r > best.value) best = {r, v};
  }
  best.witness = canonical_direction(best.witness);
  return best;
}

std::pair<double, double> symbol_extent(const ReducedCoefficients& red) {
  Eigen::SelfAdjointEigenSolver<MatrixXd> eig(red.b / red.a_nn, Eigen::EigenvaluesOnly);
  return {std::sqrt(eig.eigenvalues().minCoeff()), std::sqrt(eig.eigenvalues().maxCoeff())};
}

ConditionReport check_condition(const ModelCoefficients& coeffs, const WeightSpec& w) {
  coeffs.validate();
  w.validate();
  const ReducedCoefficients rp = reduce_coefficients(coeffs.a_plus);
  const ReducedCoefficients rm = reduce_coefficients(coeffs.a_minus);
  const SupRatio sup = sup_m_ratio(rp, rm);
  ConditionReport report;
  report.alpha_ratio = w.alpha_plus / w.alpha_minus;
  report.sup_ratio = sup.value;
  report.witness = sup.witness;
  report.satisfied = report.alpha_ratio > sup.value;
  if (report.satisfied) report.sigma = std::sqrt(report.alpha_ratio / sup.value);
  return report;
}

RegionLabel classify_region(const ReducedCoefficients& red_plus, const WeightSpec& w,
                            const TangentialFrequency& freq, double sigma0, double sigma) {
  if (!(sigma0 > 1.0 && sigma0 < sigma)) {
    throw ValidationError("sigma0", "requires 1 < sigma0 < sigma");
  }
  const double m = tangential_symbol(red_plus, freq.xi);
  const double xi_abs = freq.xi_norm();
  const double lead = freq.tau * w.alpha_plus;
  const bool in_gamma = xi_abs < 2.0 || lead > sigma0 * m;
  const bool in_tilde = xi_abs > 1.0 && lead < sigma * m;
  if (in_gamma && in_tilde) return RegionLabel::Both;
  if (in_gamma) return RegionLabel::GammaOnly;
  if (in_tilde) return RegionLabel::TildeOnly;
  throw CoverFailure("classify_region: (tau, xi') lies in neither cone");
}

SubellipticityReport subellipticity_report(const ReducedCoefficients& red, bool plus_side,
                                           const WeightSpec& w, const TangentialFrequency& freq,
                                           double xi_n, double x_n,
                                           const SubellipticityConfig& config) {
  if (!(config.delta > 0.0)) throw ValidationError("delta", "must be positive");
  if (!std::isfinite(w.beta)) throw ValidationError("weight.beta", "must be finite");
  const double tau = freq.tau;
  const double phi1 = w.slope(plus_side, x_n);
  const double m = tangential_symbol(red, freq.xi);
  const double s = tangential_shift(red, freq.xi);
  const double lam = freq.lambda();
  const double zn = xi_n + s;
  const double tp = tau * phi1;

  SubellipticityReport r;
  r.q2 = zn * zn + m * m - tp * tp;
  r.q1 = tp * zn;
  // q2, q1 depend on (x_n, xi_n) only; phi'' = beta.
  r.bracket = 2.0 * tau * w.beta * (zn * zn + tp * tp);
  r.factor_bracket = tau * w.beta;
  const double tol = config.char_tolerance * lam * lam;
  r.on_char_set = std::abs(r.q2) <= tol && std::abs(r.q1) <= tol;

  const double f = tp - m;
  r.in_near_char_set = std::abs(f) <= config.delta * lam;
  const double xi_abs = freq.xi_norm();
  const double ratio = xi_abs > 0.0 ? tau / xi_abs : std::numeric_limits<double>::infinity();
  const bool ratio_ok = ratio >= 1.0 / config.ratio_bound && ratio <= config.ratio_bound;
  const bool bracket_ok = r.factor_bracket >= config.c_prime * lam;
  r.lemma_holds = w.beta > 0.0 && (!r.in_near_char_set || (ratio_ok && bracket_ok));
  return r;
}

SubellipticityScan scan_subellipticity(const ReducedCoefficients& red, bool plus_side,
                                       const WeightSpec& w, double x_min, double x_max,
                                       const SubellipticityConfig& config) {
  const double lo = plus_side ? 0.0 : x_min;
  const double hi = plus_side ? x_max : 0.0;
  SubellipticityScan scan;
  scan.weight_positive = w.slope(plus_side, lo) > 0.0 && w.slope(plus_side, hi) > 0.0;
  scan.min_margin = std::numeric_limits<double>::infinity();

  const int dim = red.tangential_dimension();
  const auto directions = sphere_samples(dim, dim == 1 ? 1 : 64);
  constexpr int kRadii = 800;
  constexpr int kDepths = 31;
  constexpr double kMaxRatio = 40.0;
  for (const VectorXd& dir : directions) {
    for (int i = 0; i <= kRadii; ++i) {
      const TangentialFrequency freq(1.0, dir * (kMaxRatio * i / kRadii));
      const double lam = freq.lambda();
      for (int k = 0; k < kDepths; ++k) {
        const double x_n = lo + (hi - lo) * k / (kDepths - 1);
        const auto r = subellipticity_report(red, plus_side, w, freq, 0.0, x_n, config);
        if (!r.in_near_char_set) continue;
        ++scan.samples_in_set;
        scan.min_margin = std::min(scan.min_margin, (r.factor_bracket - config.c_prime * lam) / lam);
        if (!r.lemma_holds) ++scan.violations;
      }
    }
  }
  scan.passed = w.beta > 0.0 && scan.violations == 0;
  return scan;
}

double select_beta(const ModelCoefficients& coeffs, double alpha_plus, double alpha_minus,
                   double x_min, double x_max, const SubellipticityConfig& config) {
  coeffs.validate();
  const ReducedCoefficients rp = reduce_coefficients(coeffs.a_plus);
  const ReducedCoefficients rm = reduce_coefficients(coeffs.a_minus);
  for (double beta = 1.0; beta <= 1024.0; beta *= 2.0) {
    const WeightSpec w{alpha_plus, alpha_minus, beta};
    const auto plus = scan_subellipticity(rp, true, w, x_min, x_max, config);
    const auto minus = scan_subellipticity(rm, false, w, x_min, x_max, config);
    if (plus.passed && minus.passed && plus.weight_positive && minus.weight_positive) return beta;
  }
  throw ValidationError("weight.beta",
                        "no beta in {1, 2, ..., 1024} passes the sub-ellipticity scan with "
                        "phi' > 0 on the domain");
}

ConvexifiedSymbols convexified_symbols(const ReducedCoefficients& red, const WeightSpec& w,
                                       const VectorXd& kappa_grad, double kappa_xn_deriv,
                                       const TangentialFrequency& freq, double x_n,
                                       double sigma0, double sigma) {
  if (kappa_grad.size() != freq.xi.size()) {
    throw ValidationError("kappa_grad", "dimension does not match xi'");
  }
  const double tau = freq.tau;
  const VectorXc zeta = freq.xi.cast<cplx>() + cplx(0.0, tau) * kappa_grad.cast<cplx>();
  const cplx m2 = tangential_form<cplx>(red, zeta);

  ConvexifiedSymbols out;
  out.frak_m = std::sqrt(m2);  // principal branch, Re >= 0
  const double base = tau * (w.slope(true, x_n) + kappa_xn_deriv + red.t.dot(kappa_grad));
  out.frak_e = base + out.frak_m.real();
  out.frak_f = base - out.frak_m.real();

  const auto [lam0, lam1] = symbol_extent(red);
  const double grad = kappa_grad.norm();
  const double xi_abs = freq.xi_norm();
  constexpr double kRel = 1e-12;
  out.smooth_root = 2.0 * lam1 * tau * grad <= lam0 * xi_abs * (1.0 + kRel);
  const double floor = 0.75 * lam0 * lam0 * xi_abs * xi_abs;
  out.realpart_bound_ok = !out.smooth_root || m2.real() >= floor * (1.0 - kRel);

  const double m = tangential_symbol(red, freq.xi);
  const double inf = std::numeric_limits<double>::infinity();
  const double upper2 = grad > 0.0 ? lam0 * xi_abs / (2.0 * lam1 * grad) : inf;
  const double lower3 = grad > 0.0 ? lam0 * xi_abs / (4.0 * lam1 * grad) : inf;
  out.in_zone[0] = tau * w.alpha_plus <= sigma * m;
  out.in_zone[1] = tau >= sigma0 * m / w.alpha_plus && tau <= upper2;
  out.in_zone[2] = tau >= lower3;
  for (int z = 0; z < 3; ++z) {
    if (out.in_zone[z]) {
      out.zone = static_cast<ConvexZone>(z + 1);
      return out;
    }
  }
  throw CoverFailure("convexified_symbols: point lies in none of the three zones");
}

}  // namespace carleman
