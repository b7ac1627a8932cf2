#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "slicing/errors.hpp"
#include "slicing/parallel.hpp"
#include "slicing/quadrature.hpp"
#include "slicing/random.hpp"

namespace slicing {
namespace {

TEST(Integrate, Polynomial) {
  const auto r = integrate([](double x) { return x * x * x - 2 * x; }, -1.0, 3.0);
  EXPECT_NEAR(r.value, 20.0 - 8.0, 1e-12);
}

TEST(Integrate, GaussianMass) {
  auto f = [](double x) { return std::exp(-0.5 * x * x); };
  EXPECT_NEAR(integrate(f, -40.0, 40.0).value, std::sqrt(2.0 * std::numbers::pi), 1e-10);
}

TEST(Integrate, KinkWithBreak) {
  const double breaks[] = {0.3};
  const auto r = integrate([](double x) { return std::abs(x - 0.3); }, 0.0, 1.0, {}, breaks);
  EXPECT_NEAR(r.value, 0.5 * (0.09 + 0.49), 1e-13);
}

TEST(Integrate, LogSingularityAtEndpoint) {
  QuadratureOptions o;
  o.abs_tol = 1e-12;
  const auto r = integrate([](double x) { return -std::log(x); }, 0.0, 1.0, o);
  EXPECT_NEAR(r.value, 1.0, 1e-10);
}

TEST(Integrate, ThrowsWhenBudgetExhausted) {
  QuadratureOptions o;
  o.max_intervals = 3;
  o.abs_tol = 1e-15;
  o.rel_tol = 0.0;
  EXPECT_THROW(integrate([](double x) { return std::sin(1.0 / (x + 1e-3)); }, 0.0, 1.0, o), NumericalError);
}

TEST(GaussLegendre, ExactForPolynomials) {
  std::vector<double> x, w;
  gauss_legendre(10, x, w);
  double sum = 0.0, x18 = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sum += w[i];
    x18 += w[i] * std::pow(x[i], 18);
  }
  EXPECT_NEAR(sum, 2.0, 1e-14);
  EXPECT_NEAR(x18, 2.0 / 19.0, 1e-14);
}

TEST(Random, SubstreamsAreReproducibleAndDistinct) {
  const Rng root(42);
  Rng a = root.substream(3), b = root.substream(3), c = root.substream(4);
  const double x = a.normal();
  EXPECT_EQ(x, b.normal());
  EXPECT_NE(x, c.normal());
  EXPECT_NE(derive_seed(1, 0), derive_seed(2, 0));
}

TEST(Parallel, ResultsIndependentOfThreadCount) {
  std::vector<double> one(1000), four(1000);
  const Rng root(7);
  set_thread_count(1);
  parallel_for(one.size(), [&](std::size_t i) { one[i] = root.substream(i).normal(); });
  set_thread_count(4);
  parallel_for(four.size(), [&](std::size_t i) { four[i] = root.substream(i).normal(); });
  set_thread_count(0);
  EXPECT_EQ(one, four);
}

TEST(Parallel, PropagatesExceptions) {
  set_thread_count(3);
  EXPECT_THROW(parallel_for(10, [](std::size_t i) {
                 if (i == 7) throw DomainError("boom");
               }),
               DomainError);
  set_thread_count(0);
}

}  // namespace
}  // namespace slicing
