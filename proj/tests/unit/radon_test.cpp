#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "slicing/errors.hpp"
#include "slicing/radon.hpp"

namespace slicing {
namespace {

constexpr double kPi = std::numbers::pi;

TEST(RadonQuadrature, Weights) {
  EXPECT_NEAR(RadonQuadrature(3).total_weight(), 2 * kPi, 1e-12);
  EXPECT_NEAR(RadonQuadrature(4).total_weight(), 4 * kPi, 1e-12);
  EXPECT_THROW(RadonQuadrature(5), DomainError);
}

TEST(RadonTransform, ConstantsAndOddFunctions) {
  Rng rng(1);
  for (int n : {3, 4}) {
    const RadonQuadrature quad(n);
    const UnitVector xi = sample_sphere(n, rng);
    const double one = radon_transform([](const Vector&) { return 1.0; }, xi, quad);
    EXPECT_NEAR(one, quad.total_weight(), 1e-9);
    const Vector w = sample_sphere(n, rng).coords();
    EXPECT_NEAR(radon_transform([&](const Vector& x) { return x.dot(w); }, xi, quad), 0.0, 1e-9);
    EXPECT_NEAR(radon_transform([&](const Vector& x) { return x.dot(xi.coords()); }, xi, quad), 0.0, 1e-9);
  }
}

TEST(RadonTransform, Linear) {
  Rng rng(2);
  const RadonQuadrature quad(3);
  const UnitVector xi = sample_sphere(3, rng);
  auto g = [](const Vector& x) { return std::exp(x[0]) + x[1] * x[1]; };
  auto h = [](const Vector& x) { return std::cos(x[2]) * x[0]; };
  const double lhs = radon_transform([&](const Vector& x) { return 2.0 * g(x) - 3.0 * h(x); }, xi, quad);
  EXPECT_NEAR(lhs, 2.0 * radon_transform(g, xi, quad) - 3.0 * radon_transform(h, xi, quad), 1e-9);
}

TEST(RadonTransform, SecondMomentOnCircle) {
  // Over the unit circle in xi^perp, int (x.e)^2 = pi |P e|^2.
  const RadonQuadrature quad(3);
  const UnitVector xi(Vector{{1.0, 2.0, 2.0}});
  const double v = radon_transform([](const Vector& x) { return x[0] * x[0]; }, xi, quad);
  EXPECT_NEAR(v, kPi * (1.0 - xi[0] * xi[0]), 1e-10);
}

TEST(RadonTransform, NonFiniteIsReported) {
  const RadonQuadrature quad(3);
  EXPECT_THROW(radon_transform([](const Vector&) { return std::nan(""); }, UnitVector::basis(3, 0), quad),
               NumericalError);
}

TEST(Crosspolytope, IntegrandClosedForm) {
  // x_k^2 = 1/3: (1 / pi^2) int t / (1 + t^2 / 3)^3 dt = 3 / (4 pi^2).
  const Vector x = Vector::Ones(3) / std::sqrt(3.0);
  EXPECT_NEAR(crosspolytope_integrand(x), 3.0 / (4.0 * kPi * kPi), 1e-10);
  EXPECT_NEAR(crosspolytope_integrand(Vector{{0.6, -0.48, 0.64}}), crosspolytope_integrand(Vector{{-0.64, 0.6, 0.48}}),
              1e-12);
  EXPECT_THROW(crosspolytope_integrand(Vector{{1.0, 0.0, 0.0}}), SingularDirection);
}

TEST(Crosspolytope, Identity) {
  const RadonQuadrature quad(3);
  const RadonCheckRow a = crosspolytope_row(UnitVector(Vector::Ones(3)), quad, 1e-3);
  EXPECT_NEAR(a.rhs, 1.0 / std::sqrt(3.0), 1e-12);
  EXPECT_TRUE(a.pass) << a.lhs;
  const RadonCheckRow b = crosspolytope_row(UnitVector(Vector{{0.6, 0.8, 0.0}}), quad, 1e-3);
  EXPECT_NEAR(b.rhs, 1.0 / 1.4, 1e-12);
  EXPECT_TRUE(b.pass) << b.lhs;
  const RadonReport r = verify_crosspolytope(3, 10, 1e-3, Rng(3));
  EXPECT_EQ(r.rows.size(), 10u);
  EXPECT_TRUE(r.pass) << r.max_rel_error;
}

TEST(RadialIntegrand, Values) {
  auto one = [](const Vector&) { return 1.0; };
  const UnitVector theta = UnitVector::basis(3, 2);
  EXPECT_NEAR(radial_integrand(StarBody::ball(3), one, theta), 0.5, 1e-12);
  EXPECT_NEAR(radial_integrand(StarBody::ball(3, 2.0), one, theta), 2.0, 1e-12);
  auto gauss = [](const Vector& x) { return std::exp(-0.5 * x.squaredNorm()); };
  EXPECT_NEAR(radial_integrand(StarBody::ball(3, 10.0), gauss, theta), 1.0, 1e-8);
}

TEST(SectionRadon, Ellipsoids) {
  const RadonQuadrature quad(3);
  auto one = [](const Vector&) { return 1.0; };
  const RadonCheckRow ball = verify_section_radon(StarBody::ball(3), one, UnitVector(Vector{{1.0, 2.0, 3.0}}), quad);
  EXPECT_NEAR(ball.lhs, kPi, 1e-8);
  EXPECT_NEAR(ball.rhs, kPi, 1e-8);
  const RadonCheckRow flat =
      verify_section_radon(StarBody::ellipsoid(Vector{{1.0, 1.0, 2.0}}), one, UnitVector::basis(3, 2), quad);
  EXPECT_NEAR(flat.lhs, kPi, 1e-8);
  EXPECT_TRUE(flat.pass);
  auto gauss = [](const Vector& x) { return std::exp(-0.5 * x.squaredNorm()); };
  Rng rng(4);
  for (int i = 0; i < 5; ++i) {
    const RadonCheckRow row =
        verify_section_radon(StarBody::ellipsoid(Vector{{1.0, 2.0, 3.0}}), gauss, sample_sphere(3, rng), quad);
    EXPECT_TRUE(row.pass) << row.rel_error;
  }
}

TEST(BallMass, Values) {
  const RadonCheckRow a = ball_nu_mass_check(3);
  EXPECT_NEAR(a.lhs, 2.0, 1e-12);
  EXPECT_NEAR(a.rhs, 3.224, 1e-3);
  EXPECT_TRUE(a.pass);
  const RadonCheckRow b = ball_nu_mass_check(4);
  EXPECT_NEAR(b.lhs, 1.571, 1e-3);
  EXPECT_NEAR(b.rhs, 2.98, 1e-2);
  EXPECT_TRUE(b.pass);
  const RadonCheckRow c = ball_nu_mass_check(3, 5.0);
  EXPECT_NEAR(c.lhs / a.lhs, 5.0, 1e-12);
  EXPECT_NEAR(c.rhs / a.rhs, 5.0, 1e-12);
}

}  // namespace
}  // namespace slicing
