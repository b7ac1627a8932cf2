#include "slicing/tails.hpp"

#include <cmath>
#include <limits>

#include "slicing/errors.hpp"
#include "slicing/parallel.hpp"

namespace slicing {

namespace {

void check_dim(const GaussianMixtureMeasure& m, const UnitVector& xi) {
  if (xi.dim() != m.dim()) throw DomainError("direction has the wrong dimension");
}

template <typename F>
double pair_mean(const DotProfile& p, F f) {
  double total = 0.0;
  for (double a : p.a) {
    double row = 0.0;
    for (double b : p.b) row += f(a + b);
    total += row;
  }
  return total / static_cast<double>(p.pairs());
}

double second_moment(const DotProfile& p) {
  return 1.0 + pair_mean(p, [](double c) { return c * c; });
}

}  // namespace

double expected_abs(const GaussianMixtureMeasure& measure, const UnitVector& xi) {
  check_dim(measure, xi);
  return pair_mean(measure.profile(xi), folded_normal_mean);
}

double tail_prob(const GaussianMixtureMeasure& measure, const UnitVector& xi, double s) {
  check_dim(measure, xi);
  if (s < 0.0) throw DomainError("tail_prob: threshold must be >= 0");
  if (s == 0.0) return 1.0;
  return pair_mean(measure.profile(xi), [s](double c) { return normal_sf(s - c) + normal_sf(s + c); });
}

double reverse_holder_ratio(const GaussianMixtureMeasure& measure, const UnitVector& xi) {
  check_dim(measure, xi);
  const DotProfile p = measure.profile(xi);
  return std::sqrt(second_moment(p)) / pair_mean(p, folded_normal_mean);
}

TailEnvelope fit_envelope(const GaussianMixtureMeasure& measure, double alpha, double gamma, std::size_t directions,
                          double t_max, std::size_t t_points, const Rng& rng, const std::vector<UnitVector>& extra) {
  if (!(alpha > 0.0 && alpha <= 2.0)) throw DomainError("fit_envelope: alpha must lie in (0, 2]");
  if (!(gamma > 0.0)) throw DomainError("fit_envelope: gamma must be positive");
  if (!(t_max > 0.1) || t_points < 2) throw DomainError("fit_envelope: t grid needs t_max > 0.1 and >= 2 points");
  TailEnvelope env;
  env.alpha = alpha;
  env.gamma = gamma;
  env.t_grid.push_back(0.0);
  const double ratio = std::log(t_max / 0.1) / static_cast<double>(t_points - 1);
  for (std::size_t k = 0; k < t_points; ++k) env.t_grid.push_back(0.1 * std::exp(ratio * static_cast<double>(k)));
  env.t_grid.back() = t_max;

  Rng draw = rng.substream(0);
  for (std::size_t d = 0; d < directions; ++d) env.directions.push_back(sample_sphere(measure.dim(), draw));
  for (const auto& x : extra) {
    check_dim(measure, x);
    env.directions.push_back(x);
  }
  env.directions_tested = env.directions.size();
  env.per_direction.resize(env.directions.size());
  parallel_for(env.directions.size(), [&](std::size_t d) {
    const UnitVector& xi = env.directions[d];
    const DotProfile p = measure.profile(xi);
    DirectionTail row;
    row.E_xi = pair_mean(p, folded_normal_mean);
    row.second_moment = second_moment(p);
    row.ratio = std::sqrt(row.second_moment) / row.E_xi;
    row.beta_local = -1.0;
    for (double t : env.t_grid) {
      const double s = t * row.E_xi;
      const double tail =
          s == 0.0 ? 1.0 : pair_mean(p, [s](double c) { return normal_sf(s - c) + normal_sf(s + c); });
      const double v = tail * std::exp(gamma * std::pow(t, alpha));
      if (v > row.beta_local) {
        row.beta_local = v;
        row.argmax_t = t;
      }
    }
    env.per_direction[d] = row;
  });
  env.beta = -1.0;
  for (std::size_t d = 0; d < env.per_direction.size(); ++d) {
    if (env.per_direction[d].beta_local > env.beta) {
      env.beta = env.per_direction[d].beta_local;
      env.argmax_direction = d;
      env.argmax_t = env.per_direction[d].argmax_t;
    }
  }
  return env;
}

DirectionAverages direction_averages_check(const CounterexampleBody& body, std::size_t directions, const Rng& rng,
                                           double first_floor, double exp_ceiling) {
  if (body.kind != BodyKind::PsiAlpha) throw DomainError("direction averages need a psi-alpha body");
  if (directions == 0) throw DomainError("direction averages need at least one direction");
  const double alpha = std::get<PsiSchedule>(body.schedule).alpha;
  const double root_n = std::sqrt(static_cast<double>(body.n));
  DirectionAverages out;
  out.directions = directions;
  out.min_scaled_first = std::numeric_limits<double>::infinity();
  Rng draw = rng.substream(0);
  const double count = static_cast<double>(body.thetas->rows());
  for (std::size_t d = 0; d < directions; ++d) {
    const UnitVector xi = sample_sphere(body.n, draw);
    const Vector dots = *body.thetas * xi.coords();
    double first = 0.0, second = 0.0;
    for (Eigen::Index i = 0; i < dots.size(); ++i) {
      const double z = std::abs(dots[i]);
      first += z;
      second += std::exp(std::pow(0.5 * root_n * z, alpha));
    }
    out.min_scaled_first = std::min(out.min_scaled_first, root_n * first / count);
    out.max_exp_average = std::max(out.max_exp_average, second / count);
  }
  out.pass = out.min_scaled_first >= first_floor && out.max_exp_average <= exp_ceiling;
  return out;
}

TruncatedMomentReport truncated_moment_check(const TruncatedDensity& density, std::size_t directions,
                                             std::size_t samples, const Rng& rng, double floor) {
  if (directions == 0 || samples == 0) throw DomainError("truncated_moment_check: counts must be positive");
  const GaussianMixtureMeasure& mu = density.base;
  const int n = mu.dim();
  Rng draw = rng.substream(0);
  Matrix xis(n, static_cast<Eigen::Index>(directions));
  for (std::size_t d = 0; d < directions; ++d) xis.col(static_cast<Eigen::Index>(d)) = sample_sphere(n, draw).coords();

  // Accepted draws from mu restricted to sK, as |x.xi| sums per block.
  constexpr std::size_t kBlock = 256;
  const std::size_t blocks = (samples + kBlock - 1) / kBlock;
  std::vector<Matrix> sums(blocks, Matrix::Zero(static_cast<Eigen::Index>(directions), 2));
  std::vector<std::size_t> accepted(blocks, 0);
  parallel_for(blocks, [&](std::size_t b) {
    Rng local = rng.substream(b + 1);
    const std::size_t end = std::min(samples, (b + 1) * kBlock);
    for (std::size_t k = b * kBlock; k < end; ++k) {
      const Vector x = mu.sample(local);
      if (!density.contains(x)) continue;
      ++accepted[b];
      const Vector v = (xis.transpose() * x).cwiseAbs();
      sums[b].col(0) += v;
      sums[b].col(1) += v.cwiseProduct(v);
    }
  });
  Matrix total = Matrix::Zero(static_cast<Eigen::Index>(directions), 2);
  TruncatedMomentReport out;
  for (std::size_t b = 0; b < blocks; ++b) {
    total += sums[b];
    out.accepted += accepted[b];
  }
  if (out.accepted < 2) throw DegenerateTruncation("too few draws inside the truncation");
  const double count = static_cast<double>(out.accepted);
  out.min_ratio = std::numeric_limits<double>::infinity();
  for (std::size_t d = 0; d < directions; ++d) {
    const auto i = static_cast<Eigen::Index>(d);
    TruncatedMomentRow row;
    row.truncated = total(i, 0) / count;
    const double var = std::max(0.0, total(i, 1) / count - row.truncated * row.truncated);
    row.se = std::sqrt(var / count);
    row.exact = expected_abs(mu, UnitVector(xis.col(i)));
    row.ratio = row.truncated / row.exact;
    out.min_ratio = std::min(out.min_ratio, row.ratio);
    out.max_ratio = std::max(out.max_ratio, row.ratio);
    out.rows.push_back(row);
  }
  out.pass = out.min_ratio >= floor;
  return out;
}

}  // namespace slicing
