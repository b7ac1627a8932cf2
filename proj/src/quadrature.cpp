#include "slicing/quadrature.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/legendre.hpp>
#include <cmath>
#include <numbers>
#include <queue>
#include <sstream>

#include "slicing/errors.hpp"

namespace slicing {
namespace {

struct Piece {
  double a, b, value, error;
  bool operator<(const Piece& other) const { return error < other.error; }
};

Piece gk15(const std::function<double(double)>& f, double a, double b) {
  using Kronrod = boost::math::quadrature::gauss_kronrod<double, 15>;
  using Gauss = boost::math::quadrature::gauss<double, 7>;
  const auto& x = Kronrod::abscissa();
  const auto& wk = Kronrod::weights();
  const auto& wg = Gauss::weights();
  const double mid = 0.5 * (a + b);
  const double half = 0.5 * (b - a);

  const double f0 = f(mid);
  double kronrod = wk[0] * f0;
  double gauss = wg[0] * f0;
  for (std::size_t i = 1; i < x.size(); ++i) {
    const double pair = f(mid - half * x[i]) + f(mid + half * x[i]);
    kronrod += wk[i] * pair;
    if (i % 2 == 0) gauss += wg[i / 2] * pair;
  }
  kronrod *= half;
  gauss *= half;
  double err = std::abs(kronrod - gauss);
  // QUADPACK-style sharpening of the raw difference.
  err = std::min(err, 200.0 * err * std::sqrt(200.0 * err / (std::abs(kronrod) + 1e-300)));
  if (!std::isfinite(kronrod)) err = std::numeric_limits<double>::infinity();
  return {a, b, kronrod, err};
}

}  // namespace

QuadratureResult integrate(const std::function<double(double)>& f, double a, double b,
                           const QuadratureOptions& options, std::span<const double> breaks) {
  if (a == b) return {};
  if (a > b) {
    auto r = integrate(f, b, a, options, breaks);
    r.value = -r.value;
    return r;
  }
  std::vector<double> cuts{a};
  for (double c : breaks)
    if (c > a && c < b) cuts.push_back(c);
  cuts.push_back(b);
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

  std::priority_queue<Piece> heap;
  double total = 0.0, total_err = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    Piece p = gk15(f, cuts[i], cuts[i + 1]);
    total += p.value;
    total_err += p.error;
    heap.push(p);
  }
  int intervals = static_cast<int>(heap.size());
  while (total_err > std::max(options.abs_tol, options.rel_tol * std::abs(total))) {
    if (intervals >= options.max_intervals) {
      std::ostringstream msg;
      msg << "quadrature did not converge on [" << a << ", " << b << "]: error estimate "
          << total_err << " after " << intervals << " intervals";
      throw NumericalError(msg.str());
    }
    Piece worst = heap.top();
    heap.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    if (!(mid > worst.a && mid < worst.b)) {
      // Interval is at floating-point resolution; accept its estimate.
      total_err -= worst.error;
      worst.error = 0.0;
      heap.push(worst);
      continue;
    }
    Piece left = gk15(f, worst.a, mid);
    Piece right = gk15(f, mid, worst.b);
    total += left.value + right.value - worst.value;
    total_err += left.error + right.error - worst.error;
    heap.push(left);
    heap.push(right);
    ++intervals;
    // Re-sum periodically to keep cancellation drift out of the totals.
    if (intervals % 64 == 0) {
      total = 0.0;
      total_err = 0.0;
      auto copy = heap;
      while (!copy.empty()) {
        total += copy.top().value;
        total_err += copy.top().error;
        copy.pop();
      }
    }
  }
  return {total, total_err, intervals};
}

void gauss_legendre(int count, std::vector<double>& nodes, std::vector<double>& weights) {
  nodes.assign(count, 0.0);
  weights.assign(count, 0.0);
  for (int i = 0; i < count; ++i) {
    // Newton iteration from the Chebyshev-like initial guess.
    double x = std::cos(std::numbers::pi * (i + 0.75) / (count + 0.5));
    for (int it = 0; it < 100; ++it) {
      const double p = boost::math::legendre_p(count, x);
      const double dp = boost::math::legendre_p_prime(count, x);
      const double dx = p / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    const double dp = boost::math::legendre_p_prime(count, x);
    nodes[i] = x;
    weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
  }
}

}  // namespace slicing
