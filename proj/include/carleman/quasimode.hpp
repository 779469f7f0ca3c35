#pragma once

#include <optional>
#include <vector>

#include "carleman/fit.hpp"
#include "carleman/quadrature.hpp"
#include "carleman/symbols.hpp"

namespace carleman {

/// Unit point (tau0, xi0') with m_-(xi0')/alpha_- < tau0 < m_+(xi0')/alpha_+,
/// so that f_+(0) < 0 < f_-(0) along the ray it spans.
struct ViolationPoint {
  double tau0 = 0;
  VectorXd xi0;
};

struct QuasiModeSpec {
  ViolationPoint violation;
  double gamma = 10.0;          // shrinks the x_n support like 1 / gamma
  double cutoff_radius = 0.05;  // support radius of the conic cut-off chi1
};

/// Matching coefficients of the two decaying modes on the minus side:
/// a + b = 1 and a_nn^+ m_+ = a_nn^- (a - b) m_-.
struct InterfaceCoefficients {
  double a = 1;
  double b = 0;
};

std::optional<ViolationPoint> find_violation(const ModelCoefficients& coeffs, const WeightSpec& w);

InterfaceCoefficients ab_coefficients(const ModelCoefficients& coeffs, const VectorXd& xi);

/// psi(tau, xi') = chi1(tau/lambda - tau0) chi1(|xi'/lambda - xi0'|).
double conic_cutoff(const QuasiModeSpec& spec, double tau, const VectorXd& xi);

struct QuasiModeSample {
  cplx u;         // u(xi', x_n)
  cplx du;        // d/dx_n u
  cplx residual;  // M_tau u, in closed form
};

/// The quasi-mode at one tangential frequency. Holds all per-frequency
/// constants so that repeated x_n evaluations are cheap.
class QuasiModeProfile {
 public:
  QuasiModeProfile(const QuasiModeSpec& spec, const ModelCoefficients& coeffs,
                   const WeightSpec& w, double tau, const VectorXd& xi);

  QuasiModeSample plus(double x_n) const;
  QuasiModeSample minus(double x_n) const;
  /// plus for x_n > 0, minus for x_n < 0; x_n = 0 uses the plus trace.
  QuasiModeSample at(double x_n) const { return x_n < 0.0 ? minus(x_n) : plus(x_n); }

  double psi() const { return psi_; }
  bool active() const { return psi_ > 0.0; }
  double f_plus0() const { return f_plus_; }
  double f_minus0() const { return f_minus_; }
  double e_minus0() const { return e_minus_; }
  double m_plus() const { return m_plus_; }
  double m_minus() const { return m_minus_; }
  const InterfaceCoefficients& ab() const { return ab_; }

  /// Support ends: u_+ vanishes for x_n >= plus_extent(), u_- for x_n <= -minus_extent().
  double plus_extent() const { return active() ? 1.0 / k_plus_ : 0.0; }
  double minus_f_extent() const { return active() ? 1.0 / k_f_ : 0.0; }
  double minus_extent() const { return active() ? 1.0 / k_e_ : 0.0; }

  /// Appendix-style analytic bounds for this frequency (psi^2 included):
  /// lower bound of int |u|^2 dx_n and upper bound of int |M u|^2 dx_n.
  double norm2_lower_bound() const;
  double residual2_upper_bound() const;

 private:
  double tau_ = 0, beta_ = 0;
  double psi_ = 0;
  double a_plus_ = 1, a_minus_ = 1;
  double s_plus_ = 0, s_minus_ = 0;
  double m_plus_ = 0, m_minus_ = 0;
  double f_plus_ = 0, f_minus_ = 0, e_minus_ = 0;
  double k_plus_ = 0, k_f_ = 0, k_e_ = 0;
  InterfaceCoefficients ab_;
};

/// u and M_tau u at one point. Throws ValidationError when (tau, xi') lies in
/// the support of the conic cut-off but f_+(0) >= 0 or f_-(0) <= 0.
QuasiModeSample eval_quasimode(const QuasiModeSpec& spec, const ModelCoefficients& coeffs,
                               const WeightSpec& w, double tau, const VectorXd& xi, double x_n);

struct QuadratureSpec {
  int xi_nodes = 128;          // per tangential coordinate across supp psi
  int xn_nodes = 64;           // per cut-off length scale in x_n
  int panel_nodes = 16;        // Gauss-Legendre points per panel
  bool check_convergence = true;
  double convergence_tol = 1e-3;
  bool keep_samples = false;
};

/// Per-frequency integrals, kept when QuadratureSpec::keep_samples is set.
struct FrequencySample {
  VectorXd xi;
  double psi = 0;
  double norm2_u = 0;
  double norm2_residual = 0;
};

struct QuasiModeEval {
  double tau = 0;
  double norm_residual = 0;
  double norm_u = 0;
  double ratio = 0;
  double lower_bound_u2 = 0;          // analytic lower bound for norm_u^2
  double upper_bound_residual2 = 0;   // analytic upper bound for norm_residual^2
  std::vector<FrequencySample> samples;
};

struct QuasiModeSweep {
  std::vector<QuasiModeEval> rows;  // sorted by tau
  LinearFit fit;                    // log(ratio) against tau
};

/// Bounding box of supp psi in xi' at parameter tau: (lower, upper) corners.
std::pair<VectorXd, VectorXd> conic_support_box(const QuasiModeSpec& spec, double tau);

/// Tensor Gauss-Legendre nodes over conic_support_box.
struct FrequencyNodes {
  std::vector<VectorXd> xi;
  std::vector<double> weights;
};
FrequencyNodes support_quadrature(const QuasiModeSpec& spec, double tau, const QuadratureSpec& quad);

/// Tensor quadrature of ||M_tau u|| and ||u|| over (xi', x_n) at one tau.
QuasiModeEval quasimode_norms_at(const QuasiModeSpec& spec, const ModelCoefficients& coeffs,
                                 const WeightSpec& w, double tau, const QuadratureSpec& quad);

QuasiModeSweep quasimode_norms(const QuasiModeSpec& spec, const ModelCoefficients& coeffs,
                               const WeightSpec& w, const std::vector<double>& tau_list,
                               const QuadratureSpec& quad, int threads = 1);

/// x_n quadrature for one frequency profile: panels on every cut-off piece,
/// graded towards the interface on the minus side.
QuadratureRule profile_xn_rule(const QuasiModeProfile& profile, bool plus_side,
                               const QuadratureSpec& quad);

/// Physical-space quasi-mode for n = 2:
/// v(x', x_n) = chi0(tau^{1/2} x') (2 pi)^{-1} int e^{i x' xi} u(xi, x_n) dxi.
struct PhysicalGrid {
  std::vector<double> x_prime;
  std::vector<double> x_n;
};

struct PhysicalQuasiMode {
  MatrixXc v;                // rows: grid.x_n, cols: grid.x_prime
  double max_abs_v = 0;
  double continuity_error = 0;  // max_x' |v_+(x', 0) - v_-(x', 0)|
  double flux_error = 0;        // max_x' |conormal flux jump| at x_n = 0
  double flux_scale = 0;        // max_x' |conormal flux| for normalization
  bool support_ok = true;       // v == 0 wherever |tau^{1/2} x'| >= 1
  double norm_v = 0;
  double norm_Lv = 0;
  double ratio_physical = 0;
  double ratio_frequency = 0;
};

PhysicalQuasiMode build_physical_v(const QuasiModeSpec& spec, const ModelCoefficients& coeffs,
                                   const WeightSpec& w, double tau, const PhysicalGrid& grid,
                                   const QuadratureSpec& quad = {});

}  // namespace carleman
