#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "slicing/construction.hpp"
#include "slicing/measure.hpp"

namespace slicing {

/// Integral of |x.xi|: mean over atom pairs of the folded normal mean at z.xi.
double expected_abs(const GaussianMixtureMeasure& measure, const UnitVector& xi);

/// mu(|x.xi| >= s): mean over atom pairs of Q(s - c) + Q(s + c).
double tail_prob(const GaussianMixtureMeasure& measure, const UnitVector& xi, double s);

struct DirectionTail {
  double E_xi = 0.0;
  double second_moment = 0.0;
  double ratio = 0.0;
  double beta_local = 0.0;
  double argmax_t = 0.0;
};

struct TailEnvelope {
  double alpha = 0.0;
  double gamma = 0.0;
  /// max over tested directions and grid t of tail(t E_xi) exp(gamma t^alpha).
  double beta = 0.0;
  std::size_t argmax_direction = 0;
  double argmax_t = 0.0;
  std::size_t directions_tested = 0;
  std::vector<double> t_grid;
  std::vector<UnitVector> directions;
  std::vector<DirectionTail> per_direction;
};

/// t grid: 0 plus `t_points` log-spaced values in [0.1, t_max]. Directions are
/// `directions` uniform draws followed by the optional `extra` ones.
TailEnvelope fit_envelope(const GaussianMixtureMeasure& measure, double alpha, double gamma, std::size_t directions,
                          double t_max, std::size_t t_points, const Rng& rng,
                          const std::vector<UnitVector>& extra = {});

/// sqrt(second moment) / first absolute moment along xi.
double reverse_holder_ratio(const GaussianMixtureMeasure& measure, const UnitVector& xi);

struct DirectionAverages {
  /// min over directions of sqrt(n) * mean_i |Theta_i . xi|
  double min_scaled_first = 0.0;
  /// max over directions of mean_i exp((sqrt(n) |Theta_i . xi| / 2)^alpha)
  double max_exp_average = 0.0;
  std::size_t directions = 0;
  bool pass = false;
};

/// Direction averages over the atom directions of a psi-alpha body; passes when
/// the first is at least `first_floor` and the second at most `exp_ceiling`.
DirectionAverages direction_averages_check(const CounterexampleBody& body, std::size_t directions, const Rng& rng,
                                           double first_floor = 0.5, double exp_ceiling = 10.0);

struct TruncatedMomentRow {
  double truncated = 0.0;  // Monte-Carlo integral of |x.xi| under the truncated density
  double se = 0.0;
  double exact = 0.0;      // integral of |x.xi| under mu
  double ratio = 0.0;
};

struct TruncatedMomentReport {
  std::vector<TruncatedMomentRow> rows;
  double min_ratio = 0.0;
  double max_ratio = 0.0;
  std::size_t accepted = 0;
  bool pass = false;
};

/// Compares first absolute moments of the truncated density with those of the
/// mixture along random directions, by rejection sampling from mu. Passes when
/// every ratio is at least `floor`.
TruncatedMomentReport truncated_moment_check(const TruncatedDensity& density, std::size_t directions,
                                             std::size_t samples, const Rng& rng, double floor = 0.9);

}  // namespace slicing
