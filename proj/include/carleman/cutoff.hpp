#pragma once

namespace carleman {

/// Value and first two derivatives of a cut-off at one point.
struct CutoffValue {
  double value = 0;
  double d1 = 0;
  double d2 = 0;
};

/// Even C-infinity cut-off: 1 on [-1/2, 1/2], 0 outside (-1, 1), with the
/// transition 1 / (1 + exp(1/(1-y) - 1/y)), y = 2|t| - 1.
CutoffValue chi0(double t);

/// chi0(t / radius): identically 1 on |t| <= radius / 2, supported in |t| < radius.
CutoffValue chi1(double t, double radius);

/// Sup norms of chi0' and chi0'' (dense sampling of the transition).
struct CutoffBounds {
  double d1_sup = 0;
  double d2_sup = 0;
};
const CutoffBounds& chi0_bounds();

}  // namespace carleman
