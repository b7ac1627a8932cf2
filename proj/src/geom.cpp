#include "slicing/geom.hpp"

#include <algorithm>
#include <boost/math/special_functions/gamma.hpp>
#include <cmath>
#include <numbers>

#include "slicing/errors.hpp"

namespace slicing {

UnitVector::UnitVector(Vector v) : v_(std::move(v)) {
  if (v_.size() == 0) throw DomainError("unit vector needs dimension >= 1");
  const double norm = v_.norm();
  if (!(norm > 0.0) || !std::isfinite(norm)) throw DomainError("cannot normalize a zero vector");
  v_ /= norm;
}

UnitVector UnitVector::basis(int n, int k) {
  if (n < 1 || k < 0 || k >= n) throw DomainError("basis index out of range");
  Vector e = Vector::Zero(n);
  e[k] = 1.0;
  return UnitVector(std::move(e), Normalized{});
}

UnitVector sample_sphere(int n, Rng& rng) {
  if (n < 1) throw DomainError("sample_sphere: dimension must be >= 1");
  Vector g(n);
  double norm2 = 0.0;
  do {
    for (int i = 0; i < n; ++i) g[i] = rng.normal();
    norm2 = g.squaredNorm();
  } while (norm2 == 0.0);
  return UnitVector(std::move(g));
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

double normal_sf(double x) { return 0.5 * std::erfc(x / std::numbers::sqrt2); }

double hyperplane_section_gaussian(const Vector& z, const UnitVector& xi, double t) {
  if (z.size() != xi.dim()) throw DomainError("hyperplane_section_gaussian: dimension mismatch");
  return gaussian_phi(t + xi.dot(z)) / std::sqrt(2.0 * std::numbers::pi);
}

double folded_normal_mean(double a) {
  // a (2 Phi(a) - 1) + sqrt(2/pi) exp(-a^2/2), with 2 Phi(a) - 1 = erf(a / sqrt 2).
  return a * std::erf(a / std::numbers::sqrt2) +
         std::sqrt(2.0 / std::numbers::pi) * gaussian_phi(a);
}

double gaussian_ball_mass(int n, double r) {
  if (n < 1) throw DomainError("gaussian_ball_mass: dimension must be >= 1");
  if (r < 0) throw DomainError("gaussian_ball_mass: radius must be >= 0");
  if (r == 0) return 0.0;
  if (std::isinf(r)) return 1.0;
  return boost::math::gamma_p(0.5 * n, 0.5 * r * r);
}

double log_ball_volume(int n) {
  return 0.5 * n * std::log(std::numbers::pi) - std::lgamma(0.5 * n + 1.0);
}

double log_sphere_area(int n) {
  return std::log(2.0) + 0.5 * n * std::log(std::numbers::pi) - std::lgamma(0.5 * n);
}

double distance_to_net(const SphereNet& net, const Vector& u) {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& p : net.points) best = std::min(best, (p.coords() - u).norm());
  return best;
}

namespace {

// Exact covering radius of a finite subset of the circle.
double circle_covering_radius(const std::vector<UnitVector>& points) {
  std::vector<double> angles;
  angles.reserve(points.size());
  for (const auto& p : points) angles.push_back(std::atan2(p[1], p[0]));
  std::sort(angles.begin(), angles.end());
  double widest = 2.0 * std::numbers::pi - (angles.back() - angles.front());
  for (std::size_t i = 1; i < angles.size(); ++i) widest = std::max(widest, angles[i] - angles[i - 1]);
  // Chord from an endpoint to the middle of the widest gap.
  return 2.0 * std::sin(0.25 * widest);
}

// Climbs the distance-to-net function from u; returns the local maximum value.
double refine_hole(const SphereNet& net, Vector u) {
  double value = distance_to_net(net, u);
  double step = 0.25 * std::max(net.delta, value);
  for (int iter = 0; iter < 200 && step > 1e-12; ++iter) {
    // Move away from the nearest point; shrink the step when that fails.
    const UnitVector* nearest = nullptr;
    double best = std::numeric_limits<double>::infinity();
    for (const auto& p : net.points) {
      const double d = (p.coords() - u).norm();
      if (d < best) {
        best = d;
        nearest = &p;
      }
    }
    Vector away = u - nearest->coords();
    away -= u.dot(away) * u;
    if (away.norm() < 1e-15) break;
    Vector trial = (u + step * away.normalized()).normalized();
    const double tv = distance_to_net(net, trial);
    if (tv > value) {
      u = trial;
      value = tv;
    } else {
      step *= 0.5;
    }
  }
  return value;
}

}  // namespace

SphereNet build_sphere_net(int n, double delta, Rng& rng, std::size_t budget, std::size_t max_points) {
  if (n < 1) throw DomainError("build_sphere_net: dimension must be >= 1");
  if (!(delta > 0.0 && delta < 2.0)) throw DomainError("build_sphere_net: delta must lie in (0, 2)");
  if (budget == 0) throw DomainError("build_sphere_net: budget must be positive");

  SphereNet net;
  net.n = n;
  net.delta = delta;
  const double keep_radius = 0.9 * delta;
  Rng draw = rng.substream(0);
  std::size_t misses = 0;
  const std::size_t max_draws = 64 * budget;
  for (std::size_t drawn = 0; drawn < max_draws && misses < budget && net.points.size() < max_points;
       ++drawn) {
    UnitVector candidate = sample_sphere(n, draw);
    if (distance_to_net(net, candidate.coords()) > keep_radius) {
      net.points.push_back(std::move(candidate));
      misses = 0;
    } else {
      ++misses;
    }
  }

  if (n == 1) {
    net.verified_radius = net.points.size() >= 2 ? 0.0 : 2.0;
    return net;
  }
  if (n == 2) {
    net.verified_radius = circle_covering_radius(net.points);
    return net;
  }
  Rng probe = rng.substream(1);
  std::vector<std::pair<double, Vector>> worst;
  const std::size_t keep = 16;
  double radius = 0.0;
  for (std::size_t i = 0; i < budget; ++i) {
    UnitVector u = sample_sphere(n, probe);
    const double d = distance_to_net(net, u.coords());
    radius = std::max(radius, d);
    if (worst.size() < keep || d > worst.back().first) {
      worst.emplace_back(d, u.coords());
      std::sort(worst.begin(), worst.end(), [](const auto& x, const auto& y) { return x.first > y.first; });
      if (worst.size() > keep) worst.pop_back();
    }
  }
  for (const auto& [d, u] : worst) radius = std::max(radius, refine_hole(net, u));
  net.verified_radius = radius;
  return net;
}

OffsetGrid offset_grid(double bound, double step, std::size_t cap) {
  if (!(bound > 0.0) || !(step > 0.0)) throw DomainError("offset_grid: bound and step must be positive");
  const double half = std::floor(bound / step * (1.0 + 1e-12));
  if (2.0 * half + 1.0 > static_cast<double>(cap)) throw GridTooLarge("offset_grid: too many values");
  const auto k = static_cast<long long>(half);
  OffsetGrid grid{bound, step, {}};
  grid.values.reserve(2 * k + 1);
  for (long long i = -k; i <= k; ++i) grid.values.push_back(static_cast<double>(i) * step);
  return grid;
}

}  // namespace slicing
