#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <vector>

#include "slicing/random.hpp"

namespace slicing {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Point of S^{n-1}. Construction normalizes; the stored coordinates always
/// have Euclidean norm 1 to within rounding.
class UnitVector {
 public:
  /// Normalizes `v`. Throws DomainError for an empty or zero vector.
  explicit UnitVector(Vector v);

  static UnitVector basis(int n, int k);

  const Vector& coords() const noexcept { return v_; }
  int dim() const noexcept { return static_cast<int>(v_.size()); }
  double operator[](int i) const { return v_[i]; }
  double dot(const Vector& x) const { return v_.dot(x); }
  UnitVector operator-() const { return UnitVector(-v_, Normalized{}); }

 private:
  struct Normalized {};
  UnitVector(Vector v, Normalized) : v_(std::move(v)) {}
  Vector v_;
};

/// Uniform point on S^{n-1} from a normalized standard Gaussian vector.
UnitVector sample_sphere(int n, Rng& rng);

/// phi(t) = exp(-t^2 / 2).
inline double gaussian_phi(double t) { return std::exp(-0.5 * t * t); }

/// Standard normal CDF and upper tail, via erfc.
double normal_cdf(double x);
double normal_sf(double x);

/// Integral over the affine hyperplane t*xi + xi^perp of the standard Gaussian
/// density centred at -z: phi(t + z.xi) / sqrt(2 pi).
double hyperplane_section_gaussian(const Vector& z, const UnitVector& xi, double t);

/// E|X| for X ~ N(a, 1).
double folded_normal_mean(double a);

/// gamma_n(r B^n): standard Gaussian mass of the centred ball of radius r.
double gaussian_ball_mass(int n, double r);

/// log |B^n| and log |S^{n-1}| (surface area of the unit sphere in R^n).
double log_ball_volume(int n);
double log_sphere_area(int n);

struct SphereNet {
  int n = 0;
  double delta = 0.0;
  std::vector<UnitVector> points;
  /// Largest distance to the net seen while probing; exact for n <= 2.
  double verified_radius = 0.0;
  bool covered() const { return verified_radius <= delta; }
};

/// Randomized greedy delta-net. Candidates are drawn uniformly and kept when
/// farther than 0.9*delta from every kept point; drawing stops after `budget`
/// consecutive rejections or when `max_points` are kept. `budget` fresh points
/// then estimate the covering radius (refined by local ascent for n >= 3).
/// A net whose verified_radius exceeds delta is returned as is.
SphereNet build_sphere_net(int n, double delta, Rng& rng, std::size_t budget,
                           std::size_t max_points = std::size_t{1} << 16);

/// Distance from u to the nearest net point.
double distance_to_net(const SphereNet& net, const Vector& u);

struct OffsetGrid {
  double bound = 0.0;
  double step = 0.0;
  std::vector<double> values;
};

/// All integer multiples of `step` in [-bound, bound]. Throws GridTooLarge when
/// the grid would exceed `cap` values.
OffsetGrid offset_grid(double bound, double step, std::size_t cap = std::size_t{1} << 24);

}  // namespace slicing
