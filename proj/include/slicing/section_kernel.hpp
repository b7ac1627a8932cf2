#pragma once

#include <cstddef>

namespace slicing::kernel {

/// sum_ij [phi(t + a_i + b_j) + phi(a_i + b_j - t)].
double pair_sum(const double* a, std::size_t na, const double* b, std::size_t nb, double t);

/// Same sum with weights w_ij = wa_i * wb_j (counts from histograms).
double weighted_pair_sum(const double* c, const double* w, std::size_t count, double t);

/// Value and derivatives of pair_sum: row[i] = sum_j u_ij, col[j] = sum_i u_ij
/// with u_ij = phi'(t + c_ij) + phi'(c_ij - t), and dt = sum_ij
/// [phi'(t + c_ij) - phi'(c_ij - t)].
double pair_sum_grad(const double* a, std::size_t na, const double* b, std::size_t nb, double t, double* row,
                     double* col, double& dt);

/// Moments of S(x) = sum_j phi(x + y_j) at each node x_m: value, first and
/// second derivative.
void phi_sum_nodes(const double* y, std::size_t ny, const double* x, std::size_t nx, double* s0, double* s1,
                   double* s2);

/// out[k] = sum_i w_i phi'(x_k + c_i).
void weighted_slope_sums(const double* c, const double* w, std::size_t nc, const double* x, std::size_t nx,
                         double* out);

}  // namespace slicing::kernel
