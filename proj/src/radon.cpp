#include "slicing/radon.hpp"

#include <Eigen/Cholesky>
#include <Eigen/QR>
#include <cmath>
#include <numbers>
#include <sstream>

#include "slicing/errors.hpp"
#include "slicing/parallel.hpp"
#include "slicing/quadrature.hpp"

namespace slicing {

namespace {

constexpr double kPi = std::numbers::pi;

double checked(const SphereFunction& g, const Vector& x) {
  const double v = g(x);
  if (!std::isfinite(v)) {
    std::ostringstream msg;
    msg << "integrand is not finite at node (" << x.transpose() << ")";
    throw NumericalError(msg.str());
  }
  return v;
}

double wrap_angle(double a) {
  a = std::fmod(a, 2.0 * kPi);
  return a < 0.0 ? a + 2.0 * kPi : a;
}

RadonCheckRow make_row(std::string check, int n, const Vector& dir, double lhs, double rhs, double tol) {
  RadonCheckRow row{std::move(check), n, dir, lhs, rhs, 0.0, false};
  row.rel_error = std::abs(lhs - rhs) / std::abs(rhs);
  row.pass = row.rel_error <= tol;
  return row;
}

}  // namespace

RadonQuadrature::RadonQuadrature(int dim) : n(dim) {
  if (dim != 3 && dim != 4) throw DomainError("Radon quadrature supports n = 3 and n = 4 only");
}

double RadonQuadrature::total_weight() const { return std::exp(log_sphere_area(n - 1)); }

Matrix orthonormal_complement(const UnitVector& xi) {
  const int n = xi.dim();
  Eigen::HouseholderQR<Matrix> qr(xi.coords());
  const Matrix q = qr.householderQ() * Matrix::Identity(n, n);
  return q.rightCols(n - 1);
}

double radon_transform(const SphereFunction& g, const UnitVector& xi, const RadonQuadrature& quad) {
  if (xi.dim() != quad.n) throw DomainError("radon_transform: dimension mismatch");
  const Matrix frame = orthonormal_complement(xi);
  if (quad.n == 3) {
    const Vector u = frame.col(0);
    const Vector v = frame.col(1);
    std::vector<double> breaks;
    for (int k = 0; k < 3; ++k) {
      if (std::hypot(u[k], v[k]) == 0.0) continue;
      const double nearest = std::atan2(v[k], u[k]);
      breaks.push_back(wrap_angle(nearest));
      breaks.push_back(wrap_angle(nearest + kPi));
    }
    QuadratureOptions opts;
    opts.abs_tol = quad.abs_tol;
    opts.rel_tol = quad.rel_tol;
    opts.max_intervals = 20000;
    auto f = [&](double a) { return checked(g, std::cos(a) * u + std::sin(a) * v); };
    return integrate(f, 0.0, 2.0 * kPi, opts, breaks).value;
  }
  std::vector<double> nodes, weights;
  gauss_legendre(quad.legendre_points, nodes, weights);
  const Vector w = frame.col(0), u = frame.col(1), v = frame.col(2);
  const double dphi = 2.0 * kPi / quad.azimuth_points;
  double total = 0.0;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const double z = nodes[i];
    const double r = std::sqrt(1.0 - z * z);
    double ring = 0.0;
    for (int k = 0; k < quad.azimuth_points; ++k) {
      const double phi = (k + 0.5) * dphi;
      ring += checked(g, z * w + r * (std::cos(phi) * u + std::sin(phi) * v));
    }
    total += weights[i] * ring * dphi;
  }
  return total;
}

double crosspolytope_integrand(const Vector& x) {
  const int n = static_cast<int>(x.size());
  if (n < 2) throw DomainError("crosspolytope_integrand: n must be >= 2");
  int nonzero = 0;
  for (int k = 0; k < n; ++k) nonzero += x[k] != 0.0;
  // t^{n-2} / t^{2 m} must decay faster than 1/t.
  if (2 * nonzero <= n - 1) throw SingularDirection("cross-polytope integral diverges at this direction");
  // With t = tan u: sin^{n-2} cos^n / prod (cos^2 + sin^2 x_k^2).
  auto h = [&](double u) {
    const double s = std::sin(u), c = std::cos(u);
    double denom = 1.0;
    for (int k = 0; k < n; ++k) denom *= c * c + s * s * x[k] * x[k];
    return std::pow(s, n - 2) * std::pow(c, n) / denom;
  };
  std::vector<double> breaks;
  for (int k = 0; k < n; ++k)
    if (x[k] != 0.0) breaks.push_back(std::atan(1.0 / std::abs(x[k])));
  QuadratureOptions opts;
  opts.abs_tol = 1e-13;
  opts.rel_tol = 1e-11;
  opts.max_intervals = 20000;
  const double value = integrate(h, 0.0, 0.5 * kPi, opts, breaks).value;
  return value / std::pow(kPi, n - 1);
}

RadonCheckRow crosspolytope_row(const UnitVector& xi, const RadonQuadrature& quad, double tol) {
  const double lhs = radon_transform([](const Vector& x) { return crosspolytope_integrand(x); }, xi, quad);
  const double rhs = 1.0 / xi.coords().lpNorm<1>();
  return make_row("crosspolytope", xi.dim(), xi.coords(), lhs, rhs, tol);
}

RadonReport verify_crosspolytope(int n, std::size_t directions, double tol, const Rng& rng) {
  if (n != 3) throw DomainError("verify_crosspolytope: only n = 3 is supported");
  const RadonQuadrature quad(n);
  Rng draw = rng.substream(0);
  std::vector<UnitVector> dirs;
  for (std::size_t d = 0; d < directions; ++d) dirs.push_back(sample_sphere(n, draw));
  RadonReport report;
  report.rows.resize(directions);
  parallel_for(directions, [&](std::size_t d) { report.rows[d] = crosspolytope_row(dirs[d], quad, tol); });
  report.pass = true;
  for (const auto& r : report.rows) {
    report.max_rel_error = std::max(report.max_rel_error, r.rel_error);
    report.pass = report.pass && r.pass;
  }
  return report;
}

StarBody StarBody::ball(int n, double radius) {
  if (n < 2 || !(radius > 0.0)) throw DomainError("ball: invalid arguments");
  return {n, [radius](const Vector&) { return radius; }, "ball", Vector::Constant(n, radius)};
}

StarBody StarBody::ellipsoid(const Vector& axes) {
  if (axes.size() < 2 || !(axes.minCoeff() > 0.0)) throw DomainError("ellipsoid: axes must be positive");
  const Vector inv2 = axes.cwiseInverse().cwiseAbs2();
  return {static_cast<int>(axes.size()),
          [inv2](const Vector& u) { return 1.0 / std::sqrt(u.cwiseAbs2().dot(inv2)); }, "ellipsoid", axes};
}

double radial_integrand(const StarBody& K, const Density& f, const UnitVector& theta) {
  if (theta.dim() != K.n) throw DomainError("radial_integrand: dimension mismatch");
  const double rho = K.rho(theta.coords());
  if (!(rho > 0.0) || !std::isfinite(rho)) throw DomainError("radial function must be positive and finite");
  QuadratureOptions opts;
  opts.abs_tol = 1e-10;
  opts.rel_tol = 1e-12;
  auto g = [&](double r) { return std::pow(r, K.n - 2) * f(r * theta.coords()); };
  return integrate(g, 0.0, rho, opts).value;
}

RadonCheckRow verify_section_radon(const StarBody& K, const Density& f, const UnitVector& xi,
                                   const RadonQuadrature& quad, double tol) {
  if (K.n != 3 || quad.n != 3) throw DomainError("verify_section_radon: only n = 3 is supported");
  if (!K.axes) throw DomainError("verify_section_radon: direct section integral needs an ellipsoid");
  const double lhs = radon_transform(
      [&](const Vector& x) { return radial_integrand(K, f, UnitVector(x)); }, xi, quad);

  // Section {F y : y^T M y <= 1} with M = F^T A^{-2} F; map the unit disk onto
  // it through the Cholesky factor of M.
  const Matrix frame = orthonormal_complement(xi);
  const Vector inv2 = K.axes->cwiseInverse().cwiseAbs2();
  const Matrix M = frame.transpose() * inv2.asDiagonal() * frame;
  const Eigen::LLT<Matrix> llt(M);
  const Matrix Lt = llt.matrixU();
  const Matrix to_section = frame * Lt.inverse();
  const double jacobian = 1.0 / Lt.determinant();
  std::vector<double> nodes, weights;
  gauss_legendre(quad.legendre_points, nodes, weights);
  const int azimuth = quad.azimuth_points;
  const double dphi = 2.0 * kPi / azimuth;
  double rhs = 0.0;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const double r = 0.5 * (nodes[i] + 1.0);
    double ring = 0.0;
    for (int k = 0; k < azimuth; ++k) {
      const double phi = (k + 0.5) * dphi;
      Vector w(2);
      w << r * std::cos(phi), r * std::sin(phi);
      ring += f(to_section * w);
    }
    rhs += 0.5 * weights[i] * r * ring * dphi;
  }
  rhs *= jacobian;
  return make_row("section-radon", 3, xi.coords(), lhs, rhs, tol);
}

RadonCheckRow ball_nu_mass_check(int n, double radius) {
  if (n < 3 || !(radius > 0.0)) throw DomainError("ball_nu_mass_check: needs n >= 3 and positive radius");
  const double mass = radius * std::exp(log_sphere_area(n) - log_sphere_area(n - 1));
  const double bound = 2.0 * radius * std::exp(log_ball_volume(n) / n);
  RadonCheckRow row{"ball-nu-mass", n, Vector::Zero(0), mass, bound, 0.0, mass <= bound};
  row.rel_error = (bound - mass) / bound;
  return row;
}

}  // namespace slicing
