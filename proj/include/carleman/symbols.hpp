#pragma once

#include <cmath>
#include <optional>
#include <utility>

#include "carleman/types.hpp"

namespace carleman {

// Conventions: the interface is {x_n = 0}; the normal coordinate is the LAST
// index of every n x n matrix, tangential vectors have n - 1 entries.

/// Constant diffusion matrices on each side of the interface.
struct ModelCoefficients {
  MatrixXd a_plus;
  MatrixXd a_minus;

  int dimension() const { return static_cast<int>(a_plus.rows()); }

  /// Diagonal coefficients c_1..c_n per side; c_n is the normal one.
  static ModelCoefficients diagonal(const VectorXd& c_plus, const VectorXd& c_minus);
  /// Same scalar c on every axis for each side.
  static ModelCoefficients isotropic(int n, double c_plus, double c_minus);

  /// Throws ValidationError unless both matrices are n x n (n >= 2),
  /// symmetric and positive-definite.
  void validate() const;
};

/// Interface reduction of one side: A = [[A', a'], [a'^T, a_nn]] gives
/// a_nn, t = a' / a_nn and the Schur complement B = A' - a' a'^T / a_nn.
struct ReducedCoefficients {
  double a_nn = 1.0;
  VectorXd t;
  MatrixXd b;

  int tangential_dimension() const { return static_cast<int>(t.size()); }
};

struct WeightSpec {
  double alpha_plus = 1.0;
  double alpha_minus = 1.0;
  double beta = 0.0;

  void validate() const;

  double slope(bool plus_side, double x_n) const {
    return (plus_side ? alpha_plus : alpha_minus) + beta * x_n;
  }
  double value(double x_n) const {
    return (x_n >= 0.0 ? alpha_plus : alpha_minus) * x_n + 0.5 * beta * x_n * x_n;
  }
};

/// A point (tau, xi') of the tangential phase space.
struct TangentialFrequency {
  double tau = 1.0;
  VectorXd xi;

  TangentialFrequency() = default;
  TangentialFrequency(double tau_, VectorXd xi_);
  /// Convenience for n = 2.
  TangentialFrequency(double tau_, double xi_1);

  double xi_norm() const { return xi.norm(); }
  double lambda() const { return std::sqrt(tau * tau + xi.squaredNorm()); }
  void validate() const;
};

struct SymbolValues {
  double m_plus = 0, m_minus = 0;
  double s_plus = 0, s_minus = 0;
  double e_plus = 0, e_minus = 0;
  double f_plus = 0, f_minus = 0;
  double phi_prime_plus = 0, phi_prime_minus = 0;
};

struct ConditionReport {
  bool satisfied = false;
  double sup_ratio = 0;
  std::optional<double> sigma;
  VectorXd witness;
  double alpha_ratio = 0;
};

enum class RegionLabel { GammaOnly, TildeOnly, Both };

const char* to_string(RegionLabel label);

struct SupRatio {
  double value = 0;
  VectorXd witness;
};

ReducedCoefficients reduce_coefficients(const MatrixXd& a);

/// xi^T (B / a_nn) xi as a bilinear form (no conjugation), so complex
/// arguments xi + i tau grad(kappa) are evaluated as the analytic extension.
template <typename Scalar>
Scalar tangential_form(const ReducedCoefficients& red, const VectorX<Scalar>& xi) {
  const VectorX<Scalar> bx = red.b.template cast<Scalar>() * xi;
  return (xi.array() * bx.array()).sum() / Scalar(red.a_nn);
}

/// m(xi') = (<B xi', xi'> / a_nn)^{1/2}, exactly homogeneous of degree one.
double tangential_symbol(const ReducedCoefficients& red, const VectorXd& xi);

/// s(xi') = sum_j t_j xi_j.
inline double tangential_shift(const ReducedCoefficients& red, const VectorXd& xi) {
  return red.t.dot(xi);
}

SymbolValues symbol_values(const ReducedCoefficients& red_plus,
                           const ReducedCoefficients& red_minus, const WeightSpec& w,
                           const TangentialFrequency& freq, double x_n);

/// sup over |xi'| = 1 of m_+ / m_-, from the generalized eigenproblem of the
/// pencil (B_+ / a_nn^+, B_- / a_nn^-).
SupRatio sup_m_ratio(const ReducedCoefficients& red_plus, const ReducedCoefficients& red_minus);

/// Same supremum by direct sampling of the unit sphere (n - 1 <= 3 only).
/// Kept as an independent cross-check of `sup_m_ratio`.
SupRatio sup_m_ratio_sampled(const ReducedCoefficients& red_plus,
                             const ReducedCoefficients& red_minus, int samples = 10000);

/// (min, max) of m over the unit sphere: the constants lambda_0, lambda_1.
std::pair<double, double> symbol_extent(const ReducedCoefficients& red);

ConditionReport check_condition(const ModelCoefficients& coeffs, const WeightSpec& w);

/// Default sigma_0 = (1 + sigma) / 2.
inline double default_sigma0(double sigma) { return 0.5 * (1.0 + sigma); }

/// Membership in the two overlapping cones: Gamma where f_+ is elliptic
/// positive, Gamma~ where f_- is elliptic negative. Throws CoverFailure if
/// neither holds.
RegionLabel classify_region(const ReducedCoefficients& red_plus, const WeightSpec& w,
                            const TangentialFrequency& freq, double sigma0, double sigma);

struct SubellipticityConfig {
  double delta = 0.1;        // |f| <= delta * lambda selects the near-characteristic set
  double c_prime = 0.1;      // required lower bound tau * beta >= c' * lambda
  double ratio_bound = 10.0; // tau / |xi'| must lie in [1 / ratio_bound, ratio_bound]
  double char_tolerance = 1e-9;
};

struct SubellipticityReport {
  double q2 = 0;
  double q1 = 0;
  double bracket = 0;         // {q2, q1}
  double factor_bracket = 0;  // {xi_n + s, f}
  bool on_char_set = false;
  bool in_near_char_set = false;
  bool lemma_holds = false;
};

SubellipticityReport subellipticity_report(const ReducedCoefficients& red, bool plus_side,
                                           const WeightSpec& w, const TangentialFrequency& freq,
                                           double xi_n, double x_n,
                                           const SubellipticityConfig& config = {});

struct SubellipticityScan {
  bool passed = false;
  bool weight_positive = false;  // phi' > 0 on the whole domain
  double min_margin = 0;         // min of (tau beta - c' lambda) / lambda over the set
  long samples_in_set = 0;
  long violations = 0;
};

/// Evaluates `subellipticity_report` over a homogeneous sample of
/// (tau, xi', x_n) with tau = 1, x_n in [x_min, x_max], for one side.
SubellipticityScan scan_subellipticity(const ReducedCoefficients& red, bool plus_side,
                                       const WeightSpec& w, double x_min, double x_max,
                                       const SubellipticityConfig& config = {});

/// Smallest beta in {1, 2, 4, ..., 1024} for which both sides pass
/// `scan_subellipticity` and phi' stays positive on [x_min, x_max].
double select_beta(const ModelCoefficients& coeffs, double alpha_plus, double alpha_minus,
                   double x_min, double x_max, const SubellipticityConfig& config = {});

enum class ConvexZone { Zone1 = 1, Zone2 = 2, Zone3 = 3 };

struct ConvexifiedSymbols {
  cplx frak_m;
  double frak_e = 0;
  double frak_f = 0;
  ConvexZone zone = ConvexZone::Zone1;  // lowest-numbered zone containing the point
  bool in_zone[3] = {false, false, false};
  bool smooth_root = false;
  bool realpart_bound_ok = false;
};

/// Symbols of the factorization for a weight perturbed by a tangential
/// convex term kappa(x'), evaluated at one point. `red` is the plus side.
ConvexifiedSymbols convexified_symbols(const ReducedCoefficients& red, const WeightSpec& w,
                                       const VectorXd& kappa_grad, double kappa_xn_deriv,
                                       const TangentialFrequency& freq, double x_n,
                                       double sigma0, double sigma);

}  // namespace carleman
