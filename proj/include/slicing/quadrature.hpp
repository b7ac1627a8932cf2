#pragma once

#include <functional>
#include <span>
#include <vector>

namespace slicing {

struct QuadratureOptions {
  double abs_tol = 1e-10;
  double rel_tol = 1e-12;
  int max_intervals = 4000;
};

struct QuadratureResult {
  double value = 0.0;
  double error = 0.0;
  int intervals = 0;
};

/// Adaptive Gauss-Kronrod (7/15) integration of f over [a, b] with global
/// bisection of the worst interval. Stops when the summed error estimate is
/// below max(abs_tol, rel_tol * |value|). Interior `breaks` (sorted or not)
/// seed the initial partition; use them for kinks and narrow peaks.
/// Throws NumericalError when max_intervals is exhausted.
QuadratureResult integrate(const std::function<double(double)>& f, double a, double b,
                           const QuadratureOptions& options = {},
                           std::span<const double> breaks = {});

/// Gauss-Legendre nodes and weights on [-1, 1].
void gauss_legendre(int count, std::vector<double>& nodes, std::vector<double>& weights);

}  // namespace slicing
