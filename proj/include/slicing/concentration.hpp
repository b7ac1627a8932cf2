#pragma once

#include <cstdint>
#include <variant>

#include "slicing/random.hpp"

namespace slicing {

/// Law of Z = <Theta, xi> for Theta uniform on S^{n-1}: density
/// alpha_k (1 - s^2)^{k/2} on [-1, 1] with k = n - 3.
struct CapDistribution {
  int n = 0;
  int k = 0;
  double alpha_k = 0.0;

  explicit CapDistribution(int dim);
  double density(double s) const;
  /// Exact draw via Z^2 ~ Beta(1/2, (n-1)/2) with a random sign.
  double sample(Rng& rng) const;
};

/// exp(-p N): Bernstein-type bound on P(mean of N draws >= 3p).
double bernstein_bound(double p, std::uint64_t N);

namespace samplers {
struct Bernoulli {
  double q;
};
struct Uniform01 {};
/// Draws phi(t + R Z) with Z ~ CapDistribution(n).
struct CapPhi {
  int n;
  double R;
  double t;
};
}  // namespace samplers

using UnitSampler = std::variant<samplers::Bernoulli, samplers::Uniform01, samplers::CapPhi>;

/// True mean of a sampler (closed form or quadrature).
double sampler_mean(const UnitSampler& sampler);

struct DeviationReport {
  double p = 0.0;
  std::uint64_t N = 0;
  std::uint64_t trials = 0;
  std::uint64_t violations = 0;
  double bound = 0.0;
  double rate() const { return trials ? static_cast<double>(violations) / trials : 0.0; }
  /// Binomial standard error of the rate at the bound.
  double standard_error() const;
  bool pass() const { return rate() <= bound + 3.0 * standard_error(); }
};

/// Monte-Carlo count of trials whose sample mean of N draws reaches 3p.
/// Trials are grouped in fixed blocks, each with its own substream.
DeviationReport bernstein_empirical(const UnitSampler& sampler, double p, std::uint64_t N,
                                    std::uint64_t trials, const Rng& rng);

/// E phi(t + R Z), Z ~ CapDistribution(n). Requires n >= 3.
double cap_expectation(int n, double R, double t);

struct CapBoundCheck {
  double lhs = 0.0;
  double rhs = 0.0;
  bool pass = false;
};

/// cap_expectation(n, R, t) <= C (sqrt(n) / R) phi(c sqrt(n) t / R).
CapBoundCheck cap_expectation_bound_check(int n, double R, double t, double C, double c);

/// E exp(((sqrt(n) |Z| + 1) / 2)^alpha), Z ~ CapDistribution(n).
double psi_moment(int n, double alpha);

/// P(|Z| >= u), Z ~ CapDistribution(n).
double cap_tail(int n, double u);

}  // namespace slicing
