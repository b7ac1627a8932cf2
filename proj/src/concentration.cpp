#include "slicing/concentration.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>
#include <random>
#include <vector>

#include "slicing/errors.hpp"
#include "slicing/geom.hpp"
#include "slicing/parallel.hpp"
#include "slicing/quadrature.hpp"

namespace slicing {

CapDistribution::CapDistribution(int dim) : n(dim), k(dim - 3) {
  if (dim < 3) throw DomainError("cap distribution needs n >= 3");
  // int_{-1}^{1} (1 - s^2)^{k/2} ds = B(1/2, k/2 + 1)
  const double log_norm =
      0.5 * std::log(std::numbers::pi) + std::lgamma(0.5 * k + 1.0) - std::lgamma(0.5 * k + 1.5);
  alpha_k = std::exp(-log_norm);
}

double CapDistribution::density(double s) const {
  if (s <= -1.0 || s >= 1.0) return (k == 0 && std::abs(s) == 1.0) ? alpha_k : 0.0;
  if (k == 0) return alpha_k;
  return alpha_k * std::exp(0.5 * k * std::log1p(-s * s));
}

double CapDistribution::sample(Rng& rng) const {
  std::gamma_distribution<double> half(0.5, 1.0);
  std::gamma_distribution<double> rest(0.5 * (n - 1), 1.0);
  const double x = half(rng.engine());
  const double y = rest(rng.engine());
  const double z = std::sqrt(x / (x + y));
  return rng.uniform() < 0.5 ? -z : z;
}

double bernstein_bound(double p, std::uint64_t N) {
  if (p < 0.0 || p > 1.0) throw DomainError("bernstein_bound: p must lie in [0, 1]");
  if (N < 1) throw DomainError("bernstein_bound: N must be >= 1");
  return std::exp(-p * static_cast<double>(N));
}

double DeviationReport::standard_error() const {
  if (trials == 0) return 0.0;
  return std::sqrt(bound * (1.0 - bound) / static_cast<double>(trials));
}

namespace {

struct Draw {
  Rng& rng;
  CapDistribution* cap;
  double operator()(const samplers::Bernoulli& b) const { return rng.uniform() < b.q ? 1.0 : 0.0; }
  double operator()(const samplers::Uniform01&) const { return rng.uniform(); }
  double operator()(const samplers::CapPhi& c) const { return gaussian_phi(c.t + c.R * cap->sample(rng)); }
};

}  // namespace

double sampler_mean(const UnitSampler& sampler) {
  struct Mean {
    double operator()(const samplers::Bernoulli& b) const { return b.q; }
    double operator()(const samplers::Uniform01&) const { return 0.5; }
    double operator()(const samplers::CapPhi& c) const { return cap_expectation(c.n, c.R, c.t); }
  };
  return std::visit(Mean{}, sampler);
}

DeviationReport bernstein_empirical(const UnitSampler& sampler, double p, std::uint64_t N,
                                    std::uint64_t trials, const Rng& rng) {
  if (N < 1 || trials < 1) throw DomainError("bernstein_empirical: N and trials must be >= 1");
  if (const auto* b = std::get_if<samplers::Bernoulli>(&sampler); b && (b->q < 0.0 || b->q > 1.0))
    throw DomainError("bernoulli parameter outside [0, 1]");
  std::optional<CapDistribution> cap;
  if (const auto* c = std::get_if<samplers::CapPhi>(&sampler)) cap.emplace(c->n);

  constexpr std::uint64_t kBlock = 1024;
  const std::uint64_t blocks = (trials + kBlock - 1) / kBlock;
  std::vector<std::uint64_t> hits(blocks, 0);
  // mean >= 3p, with slack for the rounding of 3 p N.
  const double threshold = 3.0 * p * static_cast<double>(N) * (1.0 - 1e-12);
  parallel_for(blocks, [&](std::size_t b) {
    Rng block_rng = rng.substream(b);
    std::optional<CapDistribution> local = cap;
    Draw draw{block_rng, local ? &*local : nullptr};
    const std::uint64_t end = std::min(trials, (b + 1) * kBlock);
    std::uint64_t count = 0;
    for (std::uint64_t trial = b * kBlock; trial < end; ++trial) {
      double sum = 0.0;
      for (std::uint64_t i = 0; i < N; ++i) {
        const double y = std::visit(draw, sampler);
        if (!(y >= 0.0 && y <= 1.0)) throw DomainError("sampler produced a value outside [0, 1]");
        sum += y;
      }
      if (sum >= threshold) ++count;
    }
    hits[b] = count;
  });
  DeviationReport report;
  report.p = p;
  report.N = N;
  report.trials = trials;
  report.bound = bernstein_bound(p, N);
  for (auto h : hits) report.violations += h;
  return report;
}

double cap_expectation(int n, double R, double t) {
  if (n < 3) throw DomainError("cap_expectation: n must be >= 3");
  if (R < 0.0) throw DomainError("cap_expectation: R must be >= 0");
  const CapDistribution cap(n);
  if (R == 0.0) return gaussian_phi(t);
  // phi(Rs + t) peaks at s = -t/R with width 1/R.
  const double centre = -t / R;
  std::vector<double> breaks;
  for (double w : {0.0, -3.0, 3.0, -8.0, 8.0}) breaks.push_back(centre + w / R);
  // Upper bound on the value (|R Z| <= R), used to scale the absolute tolerance.
  const double scale = gaussian_phi(std::max(0.0, std::abs(t) - R));
  QuadratureOptions opts;
  opts.abs_tol = 1e-10 * std::min(1.0, scale);
  opts.rel_tol = 1e-12;
  auto f = [&](double s) { return gaussian_phi(R * s + t) * cap.density(s); };
  return integrate(f, -1.0, 1.0, opts, breaks).value;
}

CapBoundCheck cap_expectation_bound_check(int n, double R, double t, double C, double c) {
  CapBoundCheck out;
  out.lhs = cap_expectation(n, R, t);
  const double root_n = std::sqrt(static_cast<double>(n));
  out.rhs = C * (root_n / R) * gaussian_phi(c * root_n * t / R);
  out.pass = out.lhs <= out.rhs;
  return out;
}

double psi_moment(int n, double alpha) {
  if (!(alpha > 0.0 && alpha <= 2.0)) throw DomainError("psi_moment: alpha must lie in (0, 2]");
  if (n < 3) throw DomainError("psi_moment: n must be >= 3");
  const CapDistribution cap(n);
  const double root_n = std::sqrt(static_cast<double>(n));
  auto f = [&](double s) {
    const double growth = std::pow(0.5 * (root_n * s + 1.0), alpha);
    const double decay = cap.k == 0 ? 0.0 : 0.5 * cap.k * std::log1p(-s * s);
    return 2.0 * cap.alpha_k * std::exp(growth + decay);
  };
  const double breaks[] = {1.0 / root_n, 3.0 / root_n, 6.0 / root_n, 10.0 / root_n};
  QuadratureOptions opts;
  opts.abs_tol = 1e-10;
  opts.rel_tol = 1e-11;
  return integrate(f, 0.0, 1.0, opts, breaks).value;
}

double cap_tail(int n, double u) {
  if (!(u >= 0.0 && u <= 1.0)) throw DomainError("cap_tail: threshold must lie in [0, 1]");
  const CapDistribution cap(n);
  if (u == 0.0) return 1.0;
  const double root_n = std::sqrt(static_cast<double>(n));
  const double breaks[] = {1.0 / root_n, 3.0 / root_n, 6.0 / root_n};
  QuadratureOptions opts;
  opts.abs_tol = 1e-12;
  const double upper = integrate([&](double s) { return cap.density(s); }, u, 1.0, opts, breaks).value;
  return std::min(1.0, 2.0 * upper);
}

}  // namespace slicing
