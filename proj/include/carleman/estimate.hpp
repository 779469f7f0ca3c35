#pragma once

#include <cstdint>
#include <vector>

#include "carleman/discrete.hpp"

namespace carleman {

/// Both sides of the per-frequency two-sided estimate for a discrete v.
/// lhs: ||P_- v_-|| + ||P_+ v_+|| + tau^{3/2}|theta| + tau^{1/2}|xi'||theta| + tau^{1/2}|Theta|.
/// rhs: tau^{3/2}||v|| + tau^{1/2}(||D v|| + |xi'| ||v||) + tau^{3/2}(|v(0-)| + |v(0+)|)
///      + tau^{1/2}(|D v(0-)| + |D v(0+)| + |xi'|(|v(0-)| + |v(0+)|)).
struct EstimateSides {
  double lhs = 0;
  double rhs = 0;
  double ratio = 0;  // rhs / lhs, 0 when both vanish
};

/// Trapezoid L2 norm of a two-sided function; the interface node carries a
/// half weight on each side.
double interface_norm(const Grid1D& g, const InterfaceFunction& v);

/// -i d/dx on each side: centred inside, one-sided second order at both ends.
InterfaceFunction interface_derivative(const Grid1D& g, const InterfaceFunction& v);

/// Throws ValidationError if v misses the transmission conditions of `op`
/// with `data` by more than 1e-8 relative.
void check_transmission(const AssembledOperator& op, const InterfaceFunction& v,
                        const TransmissionData& data);

EstimateSides estimate_sides(const AssembledOperator& op, const InterfaceFunction& v,
                             const TransmissionData& data = {});

/// Complex Gaussian free unknowns, `smoothing` passes of nearest-neighbour
/// averaging per side, then traces solved from the transmission rows.
InterfaceFunction random_admissible_v(const AssembledOperator& op, std::uint64_t seed,
                                      int smoothing = 8, const TransmissionData& data = {});

/// Half-line identity for D_t + i g, g(t) = sign * lambda + gamma t, t >= 0:
/// ||D_t w + i g w||^2 = ||w'||^2 + ||g w||^2 + gamma ||w||^2 + g(0)|w(0)|^2.
struct HalfLineCheck {
  double lhs2 = 0;
  double rhs2 = 0;
  double identity_residual = 0;  // |lhs2 - rhs2|
  /// sign > 0: lhs2 - lambda^2 ||w||^2 - lambda |w(0)|^2.
  /// sign < 0: lhs2 + lambda |w(0)|^2 - gamma ||w||^2.
  double slack = 0;
};

/// `omega` samples w at t_k = k h and should vanish near the far end. Forward
/// differences with left-point sums, so the identity residual is O(h).
HalfLineCheck halfline_factor_check(double lambda, double gamma, int sign, const VectorXc& omega,
                                    double h);

/// Random smooth function on [0, length]: a few complex Gaussian bumps times
/// a cut-off that vanishes on [length, inf). Deterministic in the seed.
class RandomHalfLineFunction {
 public:
  RandomHalfLineFunction(std::uint64_t seed, double length);

  cplx operator()(double t) const;
  /// Values at t_k = k h, h = length / (nodes - 1).
  VectorXc sample(int nodes) const;

 private:
  struct Bump {
    cplx amplitude;
    double center, width;
  };
  double length_;
  std::vector<Bump> bumps_;
};

}  // namespace carleman
