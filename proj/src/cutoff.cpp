#include "carleman/cutoff.hpp"

#include <algorithm>
#include <cmath>

namespace carleman {

CutoffValue chi0(double t) {
  const double a = std::abs(t);
  if (a <= 0.5) return {1.0, 0.0, 0.0};
  if (a >= 1.0) return {0.0, 0.0, 0.0};
  const double y = 2.0 * a - 1.0;
  const double z = 1.0 - y;
  const double g = 1.0 / z - 1.0 / y;
  const double g1 = 1.0 / (y * y) + 1.0 / (z * z);
  const double g2 = 2.0 / (z * z * z) - 2.0 / (y * y * y);
  if (std::abs(g) > 700.0) return {g > 0 ? 0.0 : 1.0, 0.0, 0.0};
  const double c = 1.0 / (1.0 + std::exp(g));
  const double half = std::exp(0.5 * g);
  const double c_1mc = 1.0 / ((1.0 / half + half) * (1.0 / half + half));  // c (1 - c)
  const double dy = -c_1mc * g1;
  const double dyy = -dy * (1.0 - 2.0 * c) * g1 - c_1mc * g2;
  const double sign = t < 0 ? -1.0 : 1.0;
  return {c, 2.0 * sign * dy, 4.0 * dyy};
}

CutoffValue chi1(double t, double radius) {
  const CutoffValue c = chi0(t / radius);
  return {c.value, c.d1 / radius, c.d2 / (radius * radius)};
}

const CutoffBounds& chi0_bounds() {
  static const CutoffBounds bounds = [] {
    CutoffBounds b;
    constexpr int kSamples = 200000;
    for (int i = 1; i < kSamples; ++i) {
      const CutoffValue c = chi0(0.5 + 0.5 * i / kSamples);
      b.d1_sup = std::max(b.d1_sup, std::abs(c.d1));
      b.d2_sup = std::max(b.d2_sup, std::abs(c.d2));
    }
    return b;
  }();
  return bounds;
}

}  // namespace carleman
