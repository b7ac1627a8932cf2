#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "slicing/construction.hpp"
#include "slicing/measure.hpp"

namespace slicing {

/// Integral of the mixture density over {x : x.xi = t}:
/// (1 / P) sum over pairs [phi(t + c) + phi(c - t)] / (2 sqrt(2 pi)), c = z.xi.
double section_value(const GaussianMixtureMeasure& measure, const UnitVector& xi, double t);
double section_value(const DotProfile& profile, double t);

struct BinnedSections {
  std::vector<double> values;
  /// Bound on |binned - exact| valid for every returned value.
  double error_bound = 0.0;
  double bin_width = 0.0;
};

/// Rounds a and b to a common grid of spacing max(range a, range b) / bins,
/// convolves the two histograms with an FFT, and sums phi against the
/// convolved offsets. The bound follows from phi being 1-Lipschitz.
BinnedSections section_value_binned(const DotProfile& profile, std::span<const double> ts, std::size_t bins);

struct SectionGradient {
  double value = 0.0;
  Vector grad_xi;  // tangent to the sphere at xi
  double dt = 0.0;
};
SectionGradient section_gradient(const GaussianMixtureMeasure& measure, const UnitVector& xi, double t);

struct MaximizeOptions {
  double net_delta = 0.2;
  std::size_t net_budget = 256;
  std::size_t net_points = 2048;
  /// Normalized atom directions added to the candidate list, per stage.
  std::size_t atom_seeds = 256;
  double t_bound = 0.0;  // 0: sum of stage radii + 3
  double t_step = 0.0;   // 0: 0.05 * max(largest radius, 1)
  std::size_t ascent_budget = 200;
  std::size_t restarts = 64;
  std::size_t bins = std::size_t{1} << 14;
  /// Stage-one scoring is exact up to this many atom pairs, binned above.
  std::size_t exact_limit = std::size_t{1} << 16;
};

struct MaximizerTrace {
  std::string source;  // net | atom
  std::string stage;   // net | ascent
  std::size_t seed_rank = 0;
  double t = 0.0;
  double value = 0.0;
};

struct MaximizerReport {
  UnitVector best_xi{Vector::Ones(1)};
  double best_t = 0.0;
  /// Best value found: a lower bound on the supremum.
  double value = 0.0;
  double net_stage_value = 0.0;
  std::string best_source;
  std::size_t ascent_iters = 0;
  std::size_t budget_used = 0;
  std::size_t candidates = 0;
  double net_radius = 0.0;
  std::vector<MaximizerTrace> trace;
};

/// Net-plus-grid search followed by projected gradient ascent from the best
/// `restarts` candidates. Deterministic given the rng seed.
MaximizerReport maximize_section(const GaussianMixtureMeasure& measure, const MaximizeOptions& options,
                                 const Rng& rng);

struct SectionEstimate {
  double estimate = 0.0;
  double se = 0.0;
  double inside_fraction = 0.0;
  double section = 0.0;
  std::size_t samples = 0;
};

/// Section of the truncated density f = g 1_{sK} / mu(sK) over x.xi = t,
/// from hyperplane-conditional mixture draws.
SectionEstimate truncated_section_estimate(const TruncatedDensity& density, const UnitVector& xi, double t,
                                           std::size_t samples, const Rng& rng);

/// Integral of |x.theta|^2: 1 + mean over atoms of (z.theta)^2.
double second_moment_direction(const GaussianMixtureMeasure& measure, const UnitVector& theta);

struct SecondMomentCheck {
  double lhs = 0.0;  // second moment
  double rhs = 0.0;  // 1 / (12 M^2)
  double margin = 0.0;
  bool pass = false;
};
/// Passes when the second moment along theta is at least 1 / (12 M^2).
SecondMomentCheck check_second_moment_bound(const GaussianMixtureMeasure& measure, const UnitVector& theta, double M);

}  // namespace slicing
