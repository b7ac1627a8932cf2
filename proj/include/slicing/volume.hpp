#pragma once

#include <cstddef>
#include <vector>

#include "slicing/geom.hpp"

namespace slicing {

/// Half of a centrally symmetric generator family: K = conv(+-g_j) with g_j the
/// columns of `half`.
struct GeneratorSet {
  Matrix half;  // n x m
  int dim() const { return static_cast<int>(half.rows()); }
  std::size_t size() const { return static_cast<std::size_t>(half.cols()); }
  /// conv(+-scale e_k).
  static GeneratorSet cross_polytope(int n, double scale = 1.0);
  double max_norm() const;
};

/// x in K° iff max_g |x.g| <= 1.
bool polar_membership(const GeneratorSet& body, const Vector& x);

/// max_g |x.g|: support function of K, equal to the gauge of K°.
double support(const GeneratorSet& body, const Vector& x);

struct GaugeResult {
  /// Minimal sum |lambda| representing x; exact unless `early_exit`.
  double value = 0.0;
  /// Dual lower bound on the gauge.
  double lower = 0.0;
  bool early_exit = false;
  int iterations = 0;
};

/// Linear program min sum|lambda_j| s.t. sum lambda_j g_j = x, solved by a
/// revised simplex over the signed columns. With `threshold` > 0 the solve stops
/// as soon as the answer to "gauge <= threshold" is known.
GaugeResult hull_gauge(const GeneratorSet& body, const Vector& x, double threshold = 0.0);

/// x in conv(+-g) to tolerance 1e-9 on sum|lambda|.
bool hull_membership(const GeneratorSet& body, const Vector& x);

struct KsProduct {
  double value = 0.0;      // prod P(|N(0,1)| <= s n / |g|)
  double log_value = 0.0;
  double crude = 0.0;      // prod (1 - phi(s n / |g|))
  double log_crude = 0.0;
};

/// Khatri-Sidak lower bound on gamma_n(s n K°).
KsProduct ks_product(const GeneratorSet& body, double s);

struct McEstimate {
  double estimate = 0.0;
  double se = 0.0;
  std::size_t samples = 0;
  double ci_lo() const { return estimate - 3.0 * se; }
  double ci_hi() const { return estimate + 3.0 * se; }
};

/// Fraction of standard Gaussian Z with Z / (s n) in K°.
McEstimate gaussian_polar_mc(const GeneratorSet& body, double s, std::size_t samples, const Rng& rng);

/// |K°| / |B^n| = E_u h_K(u)^{-n}, reported in log form with a lower 3 SE end.
struct RadialPolarEstimate {
  double log_mean = 0.0;
  double log_lower = 0.0;  // -inf when mean - 3 SE <= 0
  std::size_t samples = 0;
};
RadialPolarEstimate radial_polar_volume(const GeneratorSet& body, std::size_t samples, const Rng& rng);

struct VolumeBracket {
  double lower = 0.0;  // |K|^{1/n}
  double upper = 0.0;
  double ball_lower = 0.0;
  double gaussian_polar_estimate = 0.0;
  double ks_product = 0.0;
  double santalo_upper = 0.0;       // Gaussian-polar route
  double radial_santalo_upper = 0.0;  // radial polar-volume route
};

/// lower = |sqrt(n) B^n|^{1/n}; upper = the smaller of the two Santalo routes:
/// |K| <= |B^n|^2 (s n)^n / ((2 pi)^{n/2} gamma_hat) and |K| <= |B^n|^2 / |K°|_lower.
VolumeBracket volume_bracket(const GeneratorSet& body, double s, std::size_t samples, const Rng& rng);

/// Bounding-box rejection sampling for |K|, n <= 6.
McEstimate mc_volume_small_n(const GeneratorSet& body, std::size_t samples, const Rng& rng);

}  // namespace slicing
