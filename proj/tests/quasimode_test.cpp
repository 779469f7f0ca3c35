#include <doctest.h>

#include <cmath>
#include <random>

#include "carleman/cutoff.hpp"
#include "carleman/fit.hpp"
#include "carleman/quadrature.hpp"
#include "carleman/quasimode.hpp"

using namespace carleman;

namespace {

ModelCoefficients standard() {
  VectorXd cp(2), cm(2);
  cp << 4, 1;
  cm << 1, 1;
  return ModelCoefficients::diagonal(cp, cm);
}

ModelCoefficients sheared() {
  MatrixXd ap(2, 2), am(2, 2);
  ap << 4, 0.6, 0.6, 1;
  am << 1, -0.3, -0.3, 1;
  return {ap, am};
}

const WeightSpec kViolated{1.0, 1.0, 1.0};

QuasiModeSpec spec_for(const ModelCoefficients& c, double gamma) {
  QuasiModeSpec spec;
  spec.violation = *find_violation(c, kViolated);
  spec.gamma = gamma;
  return spec;
}

VectorXd on_ray(const QuasiModeSpec& spec, double tau) {
  return spec.violation.xi0 * (tau / spec.violation.tau0);
}

// Conjugated operator on one side applied by centred differences to the profile.
cplx fd_residual(const QuasiModeProfile& p, const ModelCoefficients& c, const WeightSpec& w,
                 double tau, const VectorXd& xi, double x, double h) {
  const bool plus = x > 0.0;
  const ReducedCoefficients red = reduce_coefficients(plus ? c.a_plus : c.a_minus);
  const double s = tangential_shift(red, xi), m = tangential_symbol(red, xi);
  const double ph = tau * w.slope(plus, x);
  const cplx I(0, 1);
  const cplx u0 = p.at(x).u, um = p.at(x - h).u, up = p.at(x + h).u;
  const cplx d1 = (up - um) / (2 * h), d2 = (up - 2.0 * u0 + um) / (h * h);
  return red.a_nn * (-d2 + (2.0 * ph - 2.0 * I * s) * d1 +
                     (tau * w.beta + s * s + 2.0 * I * s * ph - ph * ph + m * m) * u0);
}

std::vector<double> tau_grid() {
  std::vector<double> t;
  for (double x = 100; x <= 500; x += 50) t.push_back(x);
  return t;
}

}  // namespace

TEST_CASE("cut-off values and derivatives") {
  CHECK(chi0(0.0).value == 1.0);
  CHECK(chi0(0.5).value == 1.0);
  CHECK(chi0(-0.5).value == 1.0);
  CHECK(chi0(1.0).value == 0.0);
  CHECK(chi0(-1.3).value == 0.0);
  CHECK(chi0(0.75).value == doctest::Approx(0.5));
  const double h = 1e-5;
  for (double t : {-0.9, -0.7, 0.55, 0.62, 0.8, 0.97}) {
    CHECK(chi0(t).d1 == doctest::Approx((chi0(t + h).value - chi0(t - h).value) / (2 * h)).epsilon(1e-6));
    CHECK(chi0(t).d2 == doctest::Approx((chi0(t + h).d1 - chi0(t - h).d1) / (2 * h)).epsilon(1e-5));
  }
  double d1 = 0, d2 = 0;
  for (int k = 0; k <= 100000; ++k) {
    const auto c = chi0(0.5 + 0.5 * k / 100000.0);
    d1 = std::max(d1, std::abs(c.d1));
    d2 = std::max(d2, std::abs(c.d2));
  }
  CHECK(chi0_bounds().d1_sup >= d1 * (1 - 1e-9));
  CHECK(chi0_bounds().d2_sup >= d2 * (1 - 1e-9));
  CHECK(chi1(0.02, 0.05).value == 1.0);
  CHECK(chi1(0.05, 0.05).value == 0.0);
}

TEST_CASE("Gauss-Legendre rules integrate polynomials exactly") {
  for (int n : {1, 2, 5, 16, 40}) {
    const auto& rule = gauss_legendre(n);
    for (int deg = 0; deg <= 2 * n - 1; ++deg) {
      double q = 0;
      for (std::size_t i = 0; i < rule.size(); ++i) q += rule.weights[i] * std::pow(rule.nodes[i], deg);
      const double exact = deg % 2 == 1 ? 0.0 : 2.0 / (deg + 1);
      CHECK(q == doctest::Approx(exact).epsilon(1e-13));
    }
  }
  const auto rule = composite_gauss_legendre({0.0, 0.3, 1.0, 2.5}, 8);
  double q = 0;
  for (std::size_t i = 0; i < rule.size(); ++i) q += rule.weights[i] * std::exp(-rule.nodes[i]);
  CHECK(q == doctest::Approx(1.0 - std::exp(-2.5)).epsilon(1e-14));
}

TEST_CASE("graded breaks cover the interval") {
  const auto b = graded_breaks(0.0, 1.0, 0.0, 1e-3, 4);
  CHECK(b.front() == 0.0);
  CHECK(b.back() == 1.0);
  CHECK(b[1] <= 1e-3 + 1e-15);
  for (std::size_t i = 1; i < b.size(); ++i) CHECK(b[i] > b[i - 1]);
  const auto r = graded_breaks(-2.0, 0.0, 0.0, 1e-2, 2);
  CHECK(r.back() - r[r.size() - 2] <= 1e-2 + 1e-15);
}

TEST_CASE("linear fit recovers a line") {
  const std::vector<double> x{1, 2, 3, 4}, y{3, 5, 7, 9};
  const auto f = linear_fit(x, y);
  CHECK(f.slope == doctest::Approx(2.0));
  CHECK(f.intercept == doctest::Approx(1.0));
  CHECK(f.r2 == doctest::Approx(1.0));
}

TEST_CASE("violation point on the standard configuration") {
  const auto v = find_violation(standard(), kViolated);
  REQUIRE(v);
  CHECK(v->tau0 == doctest::Approx(0.83205).epsilon(1e-5));
  CHECK(std::abs(v->xi0(0)) == doctest::Approx(0.55470).epsilon(1e-5));
  const double xi = std::abs(v->xi0(0));
  CHECK(v->tau0 - 2 * xi == doctest::Approx(-0.27735).epsilon(1e-4));
  CHECK(v->tau0 - xi == doctest::Approx(0.27735).epsilon(1e-4));
  CHECK_FALSE(find_violation(standard(), {3.0, 1.0, 1.0}));
  CHECK_FALSE(find_violation(standard(), {2.0, 1.0, 1.0}));
}

TEST_CASE("violation exists exactly when the condition fails") {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> uni(0.2, 3.0);
  for (int k = 0; k < 200; ++k) {
    VectorXd cp(3), cm(3);
    for (int j = 0; j < 3; ++j) {
      cp(j) = uni(rng);
      cm(j) = uni(rng);
    }
    const auto c = ModelCoefficients::diagonal(cp, cm);
    const WeightSpec w{uni(rng), uni(rng), 1.0};
    const auto v = find_violation(c, w);
    CHECK(v.has_value() != check_condition(c, w).satisfied);
    if (!v) continue;
    const double mp = tangential_symbol(reduce_coefficients(c.a_plus), v->xi0);
    const double mm = tangential_symbol(reduce_coefficients(c.a_minus), v->xi0);
    CHECK(v->tau0 * w.alpha_plus - mp < 0.0);
    CHECK(v->tau0 * w.alpha_minus - mm > 0.0);
    CHECK(v->tau0 * v->tau0 + v->xi0.squaredNorm() == doctest::Approx(1.0));
  }
}

TEST_CASE("interface coefficients") {
  const auto ab = ab_coefficients(standard(), VectorXd::Constant(1, 0.5547));
  CHECK(ab.a == doctest::Approx(1.5));
  CHECK(ab.b == doctest::Approx(-0.5));
  const auto same = ab_coefficients(ModelCoefficients::isotropic(2, 1.0, 1.0), VectorXd::Constant(1, 2.0));
  CHECK(same.a == doctest::Approx(1.0));
  CHECK(same.b == doctest::Approx(0.0));
  CHECK_THROWS_AS(ab_coefficients(standard(), VectorXd::Zero(1)), ValidationError);
}

TEST_CASE("profile is continuous with matched flux at the interface") {
  for (const auto& c : {standard(), sheared()}) {
    const auto spec = spec_for(c, 10.0);
    for (double tau : {60.0, 100.0, 300.0}) {
      const VectorXd xi = on_ray(spec, tau);
      const QuasiModeProfile p(spec, c, kViolated, tau, xi);
      REQUIRE(p.active());
      CHECK(p.ab().a >= 0.5);
      const auto up = p.plus(0.0), um = p.minus(0.0);
      CHECK(std::abs(up.u - p.psi()) <= 1e-15);
      CHECK(std::abs(um.u - p.psi()) <= 1e-14);
      const cplx I(0, 1);
      auto flux = [&](const MatrixXd& a, const QuasiModeSample& s, double alpha) {
        const auto red = reduce_coefficients(a);
        return red.a_nn * (-I * s.du + (tangential_shift(red, xi) + I * tau * alpha) * s.u);
      };
      const cplx fp = flux(c.a_plus, up, kViolated.alpha_plus);
      const cplx fm = flux(c.a_minus, um, kViolated.alpha_minus);
      CHECK(std::abs(fp - fm) <= 1e-12 * std::abs(fp));
    }
  }
}

TEST_CASE("residual vanishes where the cut-offs are flat") {
  const auto c = standard();
  const auto spec = spec_for(c, 10.0);
  const double tau = 200;
  const QuasiModeProfile p(spec, c, kViolated, tau, on_ray(spec, tau));
  const double xp = 0.5 * p.plus_extent(), xf = 0.5 * p.minus_f_extent();
  for (int k = 0; k < 20; ++k) {
    CHECK(p.plus(xp * k / 20.0).residual == cplx(0.0));
    CHECK(p.minus(-xf * k / 20.0).residual == cplx(0.0));
  }
  CHECK(p.plus(p.plus_extent()).u == cplx(0.0));
  CHECK(p.minus(-p.minus_extent()).u == cplx(0.0));
}

TEST_CASE("closed-form residual matches finite differences at second order") {
  for (const auto& c : {standard(), sheared()}) {
    const auto spec = spec_for(c, 10.0);
    const double tau = 100;
    const VectorXd xi = on_ray(spec, tau);
    const QuasiModeProfile p(spec, c, kViolated, tau, xi);
    for (double x : {0.7 * p.plus_extent(), 0.85 * p.plus_extent(), -0.7 * p.minus_f_extent(),
                     -0.8 * p.minus_extent()}) {
      const cplx exact = p.at(x).residual;
      const double h = 2e-3 / std::abs(x) * x * x;
      const double e1 = std::abs(fd_residual(p, c, kViolated, tau, xi, x, h) - exact);
      const double e2 = std::abs(fd_residual(p, c, kViolated, tau, xi, x, h / 2) - exact);
      const double scale = std::max(std::abs(exact), std::abs(p.at(x).u) * tau);
      CHECK(e2 <= 1e-3 * scale);
      const double order = std::log2(e1 / e2);
      CHECK(order >= 1.8);
      CHECK(order <= 2.2);
    }
  }
}

TEST_CASE("profile rejects frequencies outside the violating cone") {
  const auto c = standard();
  auto spec = spec_for(c, 10.0);
  spec.cutoff_radius = 0.9;
  CHECK_THROWS_AS(QuasiModeProfile(spec, c, kViolated, 100.0, VectorXd::Constant(1, 30.0)), ValidationError);
  CHECK_THROWS_AS(QuasiModeProfile(spec_for(c, 10.0), c, {1.0, 1.0, 0.0}, 100.0, VectorXd::Constant(1, 60.0)),
                  ValidationError);
  const QuasiModeProfile off(spec_for(c, 10.0), c, kViolated, 100.0, VectorXd::Constant(1, 5.0));
  CHECK_FALSE(off.active());
  CHECK(off.at(0.0).u == cplx(0.0));
}

TEST_CASE("quadrature norms dominate and are dominated by the analytic bounds") {
  const auto c = standard();
  for (double gamma : {2.0, 10.0}) {
    const auto spec = spec_for(c, gamma);
    for (double tau : {100.0, 300.0}) {
      const auto e = quasimode_norms_at(spec, c, kViolated, tau, {});
      CHECK(e.norm_u > 0.0);
      CHECK(e.lower_bound_u2 > 0.0);
      CHECK(e.lower_bound_u2 <= e.norm_u * e.norm_u);
      CHECK(e.upper_bound_residual2 >= e.norm_residual * e.norm_residual);
      CHECK(e.ratio == doctest::Approx(e.norm_residual / e.norm_u));
    }
  }
}

TEST_CASE("quasi-mode ratio decays and the rate scales like 1/gamma") {
  const auto c = standard();
  QuadratureSpec quad;
  const auto s1 = quasimode_norms(spec_for(c, 1.0), c, kViolated, tau_grid(), quad, 2);
  const auto s2 = quasimode_norms(spec_for(c, 2.0), c, kViolated, tau_grid(), quad, 2);
  CHECK(s1.fit.slope < 0.0);
  CHECK(s1.fit.r2 >= 0.99);
  CHECK(s1.rows.back().ratio / s1.rows.front().ratio <= 1e-2);
  CHECK(s2.fit.slope < 0.0);
  const double q = s1.fit.slope / s2.fit.slope;
  CHECK(q >= 1.4);
  CHECK(q <= 2.6);
}

TEST_CASE("sweep results do not depend on the thread count") {
  const auto c = standard();
  const auto spec = spec_for(c, 10.0);
  const std::vector<double> taus{300, 100, 200};
  const auto a = quasimode_norms(spec, c, kViolated, taus, {}, 1);
  const auto b = quasimode_norms(spec, c, kViolated, taus, {}, 3);
  REQUIRE(a.rows.size() == 3);
  CHECK(a.rows[0].tau == 100);
  for (std::size_t i = 0; i < 3; ++i) CHECK(a.rows[i].ratio == b.rows[i].ratio);
}

TEST_CASE("physical quasi-mode at tau = 200") {
  const auto c = standard();
  const auto spec = spec_for(c, 10.0);
  const double tau = 200;
  PhysicalGrid grid;
  const double half = 1.0 / std::sqrt(tau);
  for (int k = -30; k <= 30; ++k) grid.x_prime.push_back(1.5 * half * k / 30.0);
  for (double x : {-0.02, -0.005, 0.0, 0.003, 0.01}) grid.x_n.push_back(x);
  const auto r = build_physical_v(spec, c, kViolated, tau, grid);
  const double q = r.ratio_physical / r.ratio_frequency;
  CHECK(q >= 0.5);
  CHECK(q <= 2.0);
  CHECK(r.max_abs_v > 0.0);
  CHECK(r.continuity_error <= 1e-8 * r.max_abs_v);
  CHECK(r.flux_error <= 1e-8 * r.flux_scale);
  CHECK(r.support_ok);
  for (std::size_t k = 0; k < grid.x_prime.size(); ++k) {
    if (std::sqrt(tau) * std::abs(grid.x_prime[k]) >= 1.0) {
      CHECK(r.v.col(static_cast<Eigen::Index>(k)).cwiseAbs().maxCoeff() == 0.0);
    }
  }
}
