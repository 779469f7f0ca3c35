#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "carleman/symbols.hpp"

using namespace carleman;

namespace {

VectorXd vec(std::initializer_list<double> v) {
  VectorXd out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index k = 0;
  for (double x : v) out(k++) = x;
  return out;
}

MatrixXd random_spd(std::mt19937_64& rng, int n) {
  std::normal_distribution<double> normal;
  MatrixXd g(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) g(i, j) = normal(rng);
  return g * g.transpose() + 0.5 * MatrixXd::Identity(n, n);
}

// Brute force over the unit circle in the test itself.
double circle_sup(const ReducedCoefficients& p, const ReducedCoefficients& m, int samples) {
  double best = 0;
  for (int k = 0; k < samples; ++k) {
    const double th = std::numbers::pi * k / samples;
    const VectorXd d = vec({std::cos(th), std::sin(th)});
    best = std::max(best, std::sqrt(d.dot(p.b * d) / p.a_nn) / std::sqrt(d.dot(m.b * d) / m.a_nn));
  }
  return best;
}

}  // namespace

TEST_CASE("reduce_coefficients on small matrices") {
  auto r = reduce_coefficients(MatrixXd::Identity(2, 2));
  CHECK(r.a_nn == 1.0);
  CHECK(r.t(0) == 0.0);
  CHECK(r.b(0, 0) == 1.0);

  MatrixXd a(2, 2);
  a << 2, 1, 1, 1;
  r = reduce_coefficients(a);
  CHECK(r.a_nn == doctest::Approx(1.0));
  CHECK(r.t(0) == doctest::Approx(1.0));
  CHECK(r.b(0, 0) == doctest::Approx(1.0));

  // <A xi, xi> with xi_n = -t xi' equals <B xi', xi'>
  const VectorXd xi = vec({1.0, -1.0});
  CHECK(xi.dot(a * xi) == doctest::Approx(1.0));
  CHECK(r.b(0, 0) * 1.0 * 1.0 == doctest::Approx(xi.dot(a * xi)));
}

TEST_CASE("reduction identity holds for random matrices") {
  std::mt19937_64 rng(7);
  std::normal_distribution<double> normal;
  for (int trial = 0; trial < 50; ++trial) {
    const int n = 2 + trial % 3;
    const MatrixXd a = random_spd(rng, n);
    const auto r = reduce_coefficients(a);
    VectorXd xp(n - 1);
    for (int k = 0; k < n - 1; ++k) xp(k) = normal(rng);
    VectorXd xi(n);
    xi << xp, -r.t.dot(xp);
    CHECK(xi.dot(a * xi) == doctest::Approx(xp.dot(r.b * xp)).epsilon(1e-10));
    CHECK(Eigen::SelfAdjointEigenSolver<MatrixXd>(r.b).eigenvalues().minCoeff() > 0.0);
  }
}

TEST_CASE("invalid matrices are rejected with the failed check") {
  MatrixXd ns(2, 2);
  ns << 1, 2, 0, 1;
  CHECK_THROWS_WITH_AS(reduce_coefficients(ns), doctest::Contains("not symmetric"), ValidationError);
  MatrixXd npd(2, 2);
  npd << 1, 2, 2, 1;
  CHECK_THROWS_WITH_AS(reduce_coefficients(npd), doctest::Contains("not positive-definite"), ValidationError);
  ModelCoefficients c{MatrixXd::Identity(2, 2), npd};
  try {
    c.validate();
    FAIL("expected an error");
  } catch (const ValidationError& e) {
    CHECK(e.field() == "coefficients.minus");
  }
}

TEST_CASE("symbol values for the diagonal example") {
  const auto c = ModelCoefficients::diagonal(vec({4, 1}), vec({1, 1}));
  const auto rp = reduce_coefficients(c.a_plus), rm = reduce_coefficients(c.a_minus);
  const auto s = symbol_values(rp, rm, {3.0, 1.0, 0.0}, TangentialFrequency(1.0, 1.0), 0.0);
  CHECK(s.m_plus == doctest::Approx(2.0));
  CHECK(s.e_plus == doctest::Approx(5.0));
  CHECK(s.f_plus == doctest::Approx(1.0));
  CHECK(s.s_plus == 0.0);
}

TEST_CASE("isotropic symbols reduce to |xi'|") {
  for (double cval : {0.3, 1.0, 7.5}) {
    const auto c = ModelCoefficients::isotropic(3, cval, 2.0 * cval);
    const auto rp = reduce_coefficients(c.a_plus), rm = reduce_coefficients(c.a_minus);
    const VectorXd xi = vec({0.6, -1.7});
    CHECK(tangential_symbol(rp, xi) == doctest::Approx(xi.norm()));
    CHECK(tangential_symbol(rm, xi) == doctest::Approx(xi.norm()));
  }
}

TEST_CASE("symbol identities and homogeneity on random inputs") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> uni(-3.0, 3.0);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 2 + trial % 3;
    const ModelCoefficients c{random_spd(rng, n), random_spd(rng, n)};
    const auto rp = reduce_coefficients(c.a_plus), rm = reduce_coefficients(c.a_minus);
    VectorXd xi(n - 1);
    for (int k = 0; k < n - 1; ++k) xi(k) = uni(rng);
    const WeightSpec w{1.0 + std::abs(uni(rng)), 1.0 + std::abs(uni(rng)), std::abs(uni(rng))};
    const double tau = 0.1 + std::abs(uni(rng));
    const double x = 0.1 * uni(rng);
    const auto s = symbol_values(rp, rm, w, TangentialFrequency(tau, xi), x);
    CHECK(s.e_plus - s.f_plus == doctest::Approx(2.0 * s.m_plus));
    CHECK(s.e_minus - s.f_minus == doctest::Approx(2.0 * s.m_minus));
    CHECK(s.e_plus + s.f_plus == doctest::Approx(2.0 * tau * s.phi_prime_plus));
    CHECK(s.e_minus + s.f_minus == doctest::Approx(2.0 * tau * s.phi_prime_minus));
    const double rho = 0.5 + std::abs(uni(rng));
    CHECK(tangential_symbol(rp, VectorXd(rho * xi)) == doctest::Approx(rho * tangential_symbol(rp, xi)));
  }
}

TEST_CASE("sup of m+/m- for the standard pairs") {
  auto c = ModelCoefficients::diagonal(vec({4, 1}), vec({1, 1}));
  auto sup = sup_m_ratio(reduce_coefficients(c.a_plus), reduce_coefficients(c.a_minus));
  CHECK(sup.value == doctest::Approx(2.0));
  CHECK(std::abs(sup.witness(0)) == doctest::Approx(1.0));

  c = ModelCoefficients::diagonal(vec({9, 4, 1}), vec({1, 1, 1}));
  sup = sup_m_ratio(reduce_coefficients(c.a_plus), reduce_coefficients(c.a_minus));
  CHECK(sup.value == doctest::Approx(3.0));
  CHECK(std::abs(sup.witness(0)) == doctest::Approx(1.0));
  CHECK(sup.witness(1) == doctest::Approx(0.0));

  const auto same = reduce_coefficients(c.a_plus);
  CHECK(sup_m_ratio(same, same).value == doctest::Approx(1.0));
}

TEST_CASE("sup ratio agrees with brute-force circle search") {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 40; ++trial) {
    const auto rp = reduce_coefficients(random_spd(rng, 3));
    const auto rm = reduce_coefficients(random_spd(rng, 3));
    const double oracle = circle_sup(rp, rm, 20000);
    CHECK(sup_m_ratio(rp, rm).value == doctest::Approx(oracle).epsilon(1e-6));
    CHECK(sup_m_ratio_sampled(rp, rm).value == doctest::Approx(oracle).epsilon(1e-4));
  }
}

TEST_CASE("check_condition examples") {
  const auto c = ModelCoefficients::diagonal(vec({4, 1}), vec({1, 1}));
  auto r = check_condition(c, {3.0, 1.0, 0.0});
  CHECK(r.satisfied);
  REQUIRE(r.sigma);
  CHECK(*r.sigma == doctest::Approx(std::sqrt(1.5)));
  CHECK(*r.sigma * *r.sigma * r.sup_ratio == doctest::Approx(r.alpha_ratio));
  r = check_condition(c, {1.0, 1.0, 0.0});
  CHECK_FALSE(r.satisfied);
  CHECK_FALSE(r.sigma);

  const auto iso = ModelCoefficients::isotropic(2, 2.0, 5.0);
  CHECK(check_condition(iso, {1.5, 1.0, 0.0}).satisfied);
  CHECK_FALSE(check_condition(iso, {1.0, 1.5, 0.0}).satisfied);
}

TEST_CASE("weight validation names the field") {
  try {
    WeightSpec{1.0, -1.0, 0.0}.validate();
    FAIL("expected an error");
  } catch (const ValidationError& e) {
    CHECK(e.field() == "weight.alpha_minus");
  }
  CHECK_THROWS_AS((WeightSpec{1.0, 1.0, -0.5}.validate()), ValidationError);
}

TEST_CASE("region classification examples") {
  const auto c = ModelCoefficients::diagonal(vec({4, 1}), vec({1, 1}));
  const auto rp = reduce_coefficients(c.a_plus);
  const WeightSpec w{3.0, 1.0, 0.0};
  const double sigma = 1.22474, sigma0 = 1.1;
  CHECK(classify_region(rp, w, TangentialFrequency(1.0, 0.5), sigma0, sigma) == RegionLabel::GammaOnly);
  CHECK(classify_region(rp, w, TangentialFrequency(1.0, 10.0), sigma0, sigma) == RegionLabel::TildeOnly);
  CHECK(classify_region(rp, w, TangentialFrequency(7.5, 10.0), sigma0, sigma) == RegionLabel::Both);
  CHECK_THROWS_AS(classify_region(rp, w, TangentialFrequency(1.0, 1.0), 1.3, sigma), ValidationError);
}

TEST_CASE("cones are elliptic away from their overlap") {
  const auto c = ModelCoefficients::diagonal(vec({4, 1}), vec({1, 1}));
  const auto rp = reduce_coefficients(c.a_plus), rm = reduce_coefficients(c.a_minus);
  const WeightSpec w{3.0, 1.0, 0.0};
  const double sigma = std::sqrt(1.5), sigma0 = default_sigma0(sigma);
  double min_plus = 1e300, min_minus = 1e300;
  for (int i = 0; i < 100; ++i) {
    for (int k = 0; k < 100; ++k) {
      const TangentialFrequency f(10.0 + i, 2.0 + k);
      const auto s = symbol_values(rp, rm, w, f, 0.0);
      const auto label = classify_region(rp, w, f, sigma0, sigma);
      if (label == RegionLabel::GammaOnly) min_plus = std::min(min_plus, s.f_plus / f.lambda());
      if (label == RegionLabel::TildeOnly) min_minus = std::min(min_minus, -s.f_minus / f.lambda());
    }
  }
  CHECK(min_plus > 0.0);
  CHECK(min_minus > 0.0);
}

namespace {

// Centred finite-difference Poisson bracket {q2, q1} in (x_n, xi_n).
double fd_bracket(const ReducedCoefficients& red, const WeightSpec& w, double tau, const VectorXd& xi,
                  double xi_n, double x_n) {
  const double m = std::sqrt(xi.dot(red.b * xi) / red.a_nn);
  const double s = red.t.dot(xi);
  auto q2 = [&](double x, double z) {
    const double p = tau * (w.alpha_plus + w.beta * x);
    return (z + s) * (z + s) + m * m - p * p;
  };
  auto q1 = [&](double x, double z) { return tau * (w.alpha_plus + w.beta * x) * (z + s); };
  const double hx = 1e-5, hz = 1e-5 * std::max(1.0, std::abs(xi_n));
  const double dq2_dz = (q2(x_n, xi_n + hz) - q2(x_n, xi_n - hz)) / (2 * hz);
  const double dq2_dx = (q2(x_n + hx, xi_n) - q2(x_n - hx, xi_n)) / (2 * hx);
  const double dq1_dz = (q1(x_n, xi_n + hz) - q1(x_n, xi_n - hz)) / (2 * hz);
  const double dq1_dx = (q1(x_n + hx, xi_n) - q1(x_n - hx, xi_n)) / (2 * hx);
  return dq2_dz * dq1_dx - dq2_dx * dq1_dz;
}

}  // namespace

TEST_CASE("sub-ellipticity bracket example and oracle") {
  const ReducedCoefficients red = reduce_coefficients(MatrixXd::Identity(2, 2));
  const WeightSpec w{3.0, 1.0, 1.0};
  const auto r = subellipticity_report(red, true, w, TangentialFrequency(2.0, 0.0), 1.0, 0.0);
  CHECK(r.bracket == doctest::Approx(148.0));
  CHECK(fd_bracket(red, w, 2.0, VectorXd::Zero(1), 1.0, 0.0) == doctest::Approx(148.0).epsilon(1e-6));

  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> uni(-2.0, 2.0);
  MatrixXd a(2, 2);
  a << 3, 0.7, 0.7, 2;
  const ReducedCoefficients red2 = reduce_coefficients(a);
  for (int k = 0; k < 100; ++k) {
    const WeightSpec wk{1.0 + std::abs(uni(rng)), 1.0, 0.5 + std::abs(uni(rng))};
    const double tau = 1.0 + std::abs(uni(rng));
    const VectorXd xi = VectorXd::Constant(1, 3.0 * uni(rng));
    const double xi_n = 3.0 * uni(rng), x_n = 0.1 * uni(rng);
    const auto rep = subellipticity_report(red2, true, wk, TangentialFrequency(tau, xi), xi_n, x_n);
    CHECK(rep.bracket == doctest::Approx(fd_bracket(red2, wk, tau, xi, xi_n, x_n)).epsilon(1e-6));
  }
}

TEST_CASE("sub-ellipticity fails without convexification") {
  const ReducedCoefficients red = reduce_coefficients(MatrixXd::Identity(2, 2));
  const auto r = subellipticity_report(red, true, {1.0, 1.0, 0.0}, TangentialFrequency(1.0, 1.0), 0.0, 0.0);
  CHECK(r.factor_bracket == 0.0);
  CHECK_FALSE(r.lemma_holds);
  const auto scan = scan_subellipticity(red, true, {1.0, 1.0, 0.0}, -0.3, 0.3);
  CHECK_FALSE(scan.passed);
}

TEST_CASE("bracket is positive on the characteristic set") {
  // q2 = q1 = 0 with tau phi' = m and xi_n + s = 0
  const auto c = ModelCoefficients::diagonal(vec({4, 1}), vec({1, 1}));
  const auto rp = reduce_coefficients(c.a_plus);
  const WeightSpec w{2.0, 1.0, 1.0};
  const auto r = subellipticity_report(rp, true, w, TangentialFrequency(1.0, 1.0), 0.0, 0.0);
  CHECK(r.on_char_set);
  CHECK(r.bracket > 0.0);
}

TEST_CASE("beta selection on the standard configurations") {
  const auto c = ModelCoefficients::diagonal(vec({4, 1}), vec({1, 1}));
  const double beta = select_beta(c, 3.0, 1.0, -0.3, 0.3);
  CHECK(beta >= 1.0);
  const WeightSpec w{3.0, 1.0, beta};
  CHECK(scan_subellipticity(reduce_coefficients(c.a_plus), true, w, -0.3, 0.3).passed);
  CHECK(scan_subellipticity(reduce_coefficients(c.a_minus), false, w, -0.3, 0.3).passed);
}

TEST_CASE("convexified symbols") {
  const auto c = ModelCoefficients::diagonal(vec({4, 1}), vec({1, 1}));
  const auto rp = reduce_coefficients(c.a_plus);
  const WeightSpec w{3.0, 1.0, 1.0};
  const double sigma = std::sqrt(1.5), sigma0 = default_sigma0(sigma);
  const TangentialFrequency f(2.0, 3.0);

  auto r = convexified_symbols(rp, w, VectorXd::Zero(1), 0.0, f, 0.0, sigma0, sigma);
  CHECK(r.frak_m.imag() == 0.0);
  CHECK(r.frak_m.real() == doctest::Approx(tangential_symbol(rp, f.xi)));
  CHECK(r.smooth_root);
  CHECK(r.realpart_bound_ok);

  // isotropic B: lambda0 = lambda1 = 1; tau |grad kappa| = |xi'| / 2 is the boundary case
  const auto iso = reduce_coefficients(MatrixXd::Identity(2, 2));
  const TangentialFrequency g(2.0, 4.0);
  const VectorXd grad = VectorXd::Constant(1, 1.0);  // tau * 1 = 2 = |xi'| / 2
  r = convexified_symbols(iso, w, grad, 0.0, g, 0.0, sigma0, sigma);
  CHECK(r.smooth_root);
  CHECK(r.realpart_bound_ok);
  CHECK(std::real(r.frak_m * r.frak_m) == doctest::Approx(0.75 * 16.0));

  r = convexified_symbols(iso, w, VectorXd::Constant(1, 1.5), 0.0, g, 0.0, sigma0, sigma);
  CHECK_FALSE(r.smooth_root);
  CHECK(r.frak_m.real() >= 0.0);
}
