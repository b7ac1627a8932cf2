#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "slicing/geom.hpp"

namespace slicing {

using SphereFunction = std::function<double(const Vector&)>;

/// Integration rule over great subspheres S^{n-1} ∩ xi^perp, n in {3, 4}.
/// n = 3 integrates adaptively over the circle angle, with breakpoints where
/// the circle passes closest to +-e_k. n = 4 uses Gauss-Legendre in the
/// height times the trapezoid rule in the azimuth on S^2.
struct RadonQuadrature {
  int n = 3;
  double abs_tol = 1e-11;
  double rel_tol = 1e-11;
  int legendre_points = 64;
  int azimuth_points = 128;

  explicit RadonQuadrature(int dim);
  /// Total weight |S^{n-2}| of the rule.
  double total_weight() const;
};

/// Orthonormal basis of xi^perp (columns).
Matrix orthonormal_complement(const UnitVector& xi);

/// Integral of g over S^{n-1} ∩ xi^perp. Throws NumericalError naming the node
/// when g is not finite there.
double radon_transform(const SphereFunction& g, const UnitVector& xi, const RadonQuadrature& quad);

/// (1 / pi^{n-1}) int_0^inf t^{n-2} prod_k 1 / (1 + t^2 x_k^2) dt, via t = tan u.
/// Throws SingularDirection when too many coordinates vanish for convergence.
double crosspolytope_integrand(const Vector& x);

struct RadonCheckRow {
  std::string check;
  int n = 0;
  Vector direction;
  double lhs = 0.0;
  double rhs = 0.0;
  double rel_error = 0.0;
  bool pass = false;
};

struct RadonReport {
  std::vector<RadonCheckRow> rows;
  double max_rel_error = 0.0;
  bool pass = false;
};

/// Radon transform of the cross-polytope density against 1 / ||xi||_1 at
/// random directions (n = 3).
RadonReport verify_crosspolytope(int n, std::size_t directions, double tol, const Rng& rng);
RadonCheckRow crosspolytope_row(const UnitVector& xi, const RadonQuadrature& quad, double tol);

struct StarBody {
  int n = 0;
  std::function<double(const Vector&)> rho;
  std::string name;
  /// Semi-axes when the body is an axis-aligned ellipsoid.
  std::optional<Vector> axes;

  static StarBody ball(int n, double radius = 1.0);
  static StarBody ellipsoid(const Vector& axes);
};

using Density = std::function<double(const Vector&)>;

/// int_0^{rho_K(theta)} r^{n-2} f(r theta) dr.
double radial_integrand(const StarBody& K, const Density& f, const UnitVector& theta);

/// Radon transform of the radial integrand against a direct integral of f over
/// the central section K ∩ xi^perp (ellipsoids, n = 3).
RadonCheckRow verify_section_radon(const StarBody& K, const Density& f, const UnitVector& xi,
                                   const RadonQuadrature& quad, double tol = 1e-6);

/// Intersection-measure mass of the ball of the given radius,
/// r |S^{n-1}| / |S^{n-2}|, against 2 |r B^n|^{1/n}.
RadonCheckRow ball_nu_mass_check(int n, double radius = 1.0);

}  // namespace slicing
