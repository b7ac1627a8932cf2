#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "slicing/errors.hpp"
#include "slicing/geom.hpp"
#include "slicing/quadrature.hpp"

namespace slicing {
namespace {

TEST(UnitVector, NormalizesAndRejectsZero) {
  Vector v(3);
  v << 3.0, 0.0, 4.0;
  const UnitVector u(v);
  EXPECT_NEAR(u.coords().norm(), 1.0, 1e-15);
  EXPECT_DOUBLE_EQ(u[0], 0.6);
  EXPECT_THROW(UnitVector(Vector::Zero(3)), DomainError);
  EXPECT_THROW(UnitVector(Vector(0)), DomainError);
}

TEST(SampleSphere, UnitNormAndDeterministic) {
  Rng a(5), b(5);
  for (int i = 0; i < 100; ++i) {
    const UnitVector x = sample_sphere(7, a);
    const UnitVector y = sample_sphere(7, b);
    EXPECT_NEAR(x.coords().norm(), 1.0, 1e-12);
    EXPECT_EQ(x.coords(), y.coords());
  }
  EXPECT_THROW(sample_sphere(0, a), DomainError);
}

TEST(SampleSphere, CoordinateMeansNearZero) {
  Rng rng(11);
  const int count = 100000;
  Vector mean = Vector::Zero(3);
  for (int i = 0; i < count; ++i) mean += sample_sphere(3, rng).coords();
  mean /= count;
  const double sigma = (1.0 / std::sqrt(3.0)) / std::sqrt(static_cast<double>(count));
  for (int k = 0; k < 3; ++k) EXPECT_LT(std::abs(mean[k]), 4.0 * sigma);
}

TEST(GaussianPhi, Values) {
  EXPECT_DOUBLE_EQ(gaussian_phi(0.0), 1.0);
  EXPECT_NEAR(gaussian_phi(3.0), 1.1109e-2, 1e-6);
  EXPECT_DOUBLE_EQ(gaussian_phi(-2.5), gaussian_phi(2.5));
}

TEST(HyperplaneSection, Values) {
  Vector z(2);
  z << 2.0, 0.0;
  const UnitVector xi = UnitVector::basis(2, 0);
  EXPECT_NEAR(hyperplane_section_gaussian(z, xi, 1.0), gaussian_phi(3.0) / std::sqrt(2.0 * std::numbers::pi), 1e-15);
  EXPECT_NEAR(hyperplane_section_gaussian(Vector::Zero(2), xi, 0.0), 0.398942, 1e-6);
  EXPECT_THROW(hyperplane_section_gaussian(Vector::Zero(3), xi, 0.0), DomainError);
}

TEST(HyperplaneSection, MatchesSlabMonteCarlo) {
  // Slab {t - h/2 < x.xi < t + h/2} of N(-z, I) has mass close to h * section.
  Rng rng(3);
  for (int n : {2, 4, 6}) {
    Vector z(n);
    for (int k = 0; k < n; ++k) z[k] = 0.3 * (k + 1);
    const UnitVector xi = sample_sphere(n, rng);
    const double t = 0.4;
    const double h = 1e-2;
    const int samples = 1000000;
    int hits = 0;
    for (int s = 0; s < samples; ++s) {
      double dot = 0.0;
      for (int k = 0; k < n; ++k) dot += (rng.normal() - z[k]) * xi[k];
      hits += std::abs(dot - t) < 0.5 * h;
    }
    const double p = static_cast<double>(hits) / samples;
    const double se = std::sqrt(p * (1 - p) / samples) / h;
    EXPECT_NEAR(p / h, hyperplane_section_gaussian(z, xi, t), 3.0 * se + 1e-4) << "n=" << n;
  }
}

TEST(FoldedNormal, Values) {
  EXPECT_NEAR(folded_normal_mean(0.0), 0.797885, 1e-6);
  EXPECT_NEAR(folded_normal_mean(10.0), 10.0, 1e-9);
  EXPECT_DOUBLE_EQ(folded_normal_mean(-1.3), folded_normal_mean(1.3));
  // E|X| by quadrature for X ~ N(2, 1).
  auto f = [](double x) { return std::abs(x) * std::exp(-0.5 * (x - 2.0) * (x - 2.0)) / std::sqrt(2.0 * std::numbers::pi); };
  const double breaks[] = {0.0, 2.0};
  const double oracle = integrate(f, -20.0, 24.0, {}, breaks).value;
  EXPECT_NEAR(folded_normal_mean(2.0), oracle, 1e-10);
  EXPECT_NEAR(folded_normal_mean(2.0), 2.0170, 1e-4);
  for (double a : {0.0, 0.5, 1.0, 3.0}) EXPECT_GE(folded_normal_mean(a), a);
}

TEST(GaussianBallMass, Values) {
  EXPECT_NEAR(gaussian_ball_mass(1, 1.96), 0.95, 1e-3);
  // Even chi-square tail: exp(-20) (1 + 20 + 20^2/2 + 20^3/6 + 20^4/24).
  EXPECT_NEAR(gaussian_ball_mass(10, 2.0 * std::sqrt(10.0)), 1.0 - std::exp(-20.0) * (1 + 20 + 200 + 8000.0 / 6 + 160000.0 / 24), 1e-13);
  for (int n : {1, 5, 50}) EXPECT_GE(gaussian_ball_mass(n, 10.0 * std::sqrt(n)), 1.0 - 1e-12);
  double prev = 0.0;
  for (double r = 0.0; r < 8.0; r += 0.25) {
    const double m = gaussian_ball_mass(4, r);
    EXPECT_GE(m, prev);
    prev = m;
  }
  EXPECT_THROW(gaussian_ball_mass(3, -1.0), DomainError);
}

TEST(BallVolume, KnownValues) {
  EXPECT_NEAR(std::exp(log_ball_volume(3)), 4.0 * std::numbers::pi / 3.0, 1e-12);
  EXPECT_NEAR(std::exp(log_sphere_area(3)), 4.0 * std::numbers::pi, 1e-12);
  EXPECT_NEAR(std::exp(log_sphere_area(2)), 2.0 * std::numbers::pi, 1e-12);
}

TEST(SphereNet, CircleCover) {
  Rng rng(1);
  const SphereNet net = build_sphere_net(2, 0.1, rng, 2000);
  EXPECT_GE(net.points.size(), 32u);
  EXPECT_LE(net.points.size(), 2500u);
  EXPECT_LE(net.verified_radius, 0.1);
  EXPECT_TRUE(net.covered());
  for (const auto& p : net.points) EXPECT_NEAR(p.coords().norm(), 1.0, 1e-12);
}

TEST(SphereNet, DimensionOne) {
  Rng rng(2);
  const SphereNet net = build_sphere_net(1, 0.5, rng, 100);
  ASSERT_EQ(net.points.size(), 2u);
  EXPECT_DOUBLE_EQ(std::abs(net.points[0][0]), 1.0);
  EXPECT_DOUBLE_EQ(net.points[0][0], -net.points[1][0]);
  EXPECT_DOUBLE_EQ(net.verified_radius, 0.0);
}

TEST(SphereNet, DeterministicAndValidated) {
  Rng a(9), b(9);
  const SphereNet x = build_sphere_net(3, 0.3, a, 500);
  const SphereNet y = build_sphere_net(3, 0.3, b, 500);
  ASSERT_EQ(x.points.size(), y.points.size());
  for (std::size_t i = 0; i < x.points.size(); ++i) EXPECT_EQ(x.points[i].coords(), y.points[i].coords());
  EXPECT_EQ(x.verified_radius, y.verified_radius);
  EXPECT_EQ(x.covered(), x.verified_radius <= 0.3);
  Rng c(9);
  const SphereNet dense = build_sphere_net(3, 0.3, c, 5000);
  EXPECT_TRUE(dense.covered()) << dense.verified_radius;
  EXPECT_THROW(build_sphere_net(3, 0.0, a, 10), DomainError);
  EXPECT_THROW(build_sphere_net(3, 2.0, a, 10), DomainError);
  EXPECT_THROW(build_sphere_net(3, 0.5, a, 0), DomainError);
}

TEST(OffsetGrid, SizeAndSymmetry) {
  const OffsetGrid g = offset_grid(8.0, 0.125);
  ASSERT_EQ(g.values.size(), 129u);
  EXPECT_DOUBLE_EQ(g.values.front(), -8.0);
  EXPECT_DOUBLE_EQ(g.values.back(), 8.0);
  EXPECT_DOUBLE_EQ(g.values[64], 0.0);
  EXPECT_EQ(offset_grid(1.0, 0.3).values.size(), 7u);
  EXPECT_THROW(offset_grid(1.0, 1e-9, 1000), GridTooLarge);
  EXPECT_THROW(offset_grid(0.0, 0.1), DomainError);
}

}  // namespace
}  // namespace slicing
