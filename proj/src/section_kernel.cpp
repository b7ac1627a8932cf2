#include "slicing/section_kernel.hpp"

#include <algorithm>
#include <cmath>

namespace slicing::kernel {

namespace {

// phi(p) + phi(m) with the terms ordered by size, so that swapping p and m
// (t -> -t) or negating both (xi -> -xi) reproduces the value bit for bit.
inline double phi_pair(double p, double m) {
  const double p2 = p * p;
  const double m2 = m * m;
  return std::exp(-0.5 * std::min(p2, m2)) + std::exp(-0.5 * std::max(p2, m2));
}

}  // namespace

double pair_sum(const double* a, std::size_t na, const double* b, std::size_t nb, double t) {
  double total = 0.0;
  for (std::size_t i = 0; i < na; ++i) {
    const double ai = a[i];
    double row = 0.0;
    for (std::size_t j = 0; j < nb; ++j) {
      const double c = ai + b[j];
      row += phi_pair(t + c, c - t);
    }
    total += row;
  }
  return total;
}

double weighted_pair_sum(const double* c, const double* w, std::size_t count, double t) {
  double total = 0.0;
  for (std::size_t k = 0; k < count; ++k) {
    total += w[k] * phi_pair(t + c[k], c[k] - t);
  }
  return total;
}

double pair_sum_grad(const double* a, std::size_t na, const double* b, std::size_t nb, double t, double* row,
                     double* col, double& dt) {
  double total = 0.0;
  double dsum = 0.0;
  for (std::size_t j = 0; j < nb; ++j) col[j] = 0.0;
  for (std::size_t i = 0; i < na; ++i) {
    const double ai = a[i];
    double value = 0.0;
    double u_row = 0.0;
    double d_row = 0.0;
    for (std::size_t j = 0; j < nb; ++j) {
      const double c = ai + b[j];
      const double p = t + c;
      const double m = c - t;
      const double ep = std::exp(-0.5 * p * p);
      const double em = std::exp(-0.5 * m * m);
      const double dp = -p * ep;
      const double dm = -m * em;
      value += ep + em;
      u_row += dp + dm;
      d_row += dp - dm;
      col[j] += dp + dm;
    }
    row[i] = u_row;
    total += value;
    dsum += d_row;
  }
  dt = dsum;
  return total;
}

void phi_sum_nodes(const double* y, std::size_t ny, const double* x, std::size_t nx, double* s0, double* s1,
                   double* s2) {
  for (std::size_t m = 0; m < nx; ++m) {
    const double xm = x[m];
    double v0 = 0.0, v1 = 0.0, v2 = 0.0;
    for (std::size_t j = 0; j < ny; ++j) {
      const double u = xm + y[j];
      const double e = std::exp(-0.5 * u * u);
      v0 += e;
      v1 -= u * e;
      v2 += (u * u - 1.0) * e;
    }
    s0[m] = v0;
    s1[m] = v1;
    s2[m] = v2;
  }
}

void weighted_slope_sums(const double* c, const double* w, std::size_t nc, const double* x, std::size_t nx,
                         double* out) {
  for (std::size_t k = 0; k < nx; ++k) {
    const double xk = x[k];
    double v = 0.0;
    for (std::size_t i = 0; i < nc; ++i) {
      const double u = xk + c[i];
      v -= w[i] * u * std::exp(-0.5 * u * u);
    }
    out[k] = v;
  }
}

}  // namespace slicing::kernel
