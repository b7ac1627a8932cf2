#pragma once

#include <cstddef>
#include <memory>
#include <vector>

#include "slicing/geom.hpp"

namespace slicing {

/// One stage of atom centres: radius * row_i(dirs). Rows need not be unit
/// vectors (tests build measures from arbitrary centres with radius 1).
struct Stage {
  double radius = 1.0;
  std::shared_ptr<const Matrix> dirs;
  std::size_t size() const { return dirs ? static_cast<std::size_t>(dirs->rows()) : 0; }
};

/// Dot products of the stage centres with a direction: a_i = R1 theta_i.xi and
/// b_j = R2 eta_j.xi. Single-stage measures have b = {0}; the pure Gaussian has
/// a = b = {0}.
struct DotProfile {
  std::vector<double> a;
  std::vector<double> b;
  std::size_t pairs() const { return a.size() * b.size(); }
};

/// gamma_n convolved with the uniform even atom law on
/// {+-(c_1 + c_2) : c_1 in stage 1, c_2 in stage 2}. Up to two stages; the
/// product set is never materialized.
class GaussianMixtureMeasure {
 public:
  GaussianMixtureMeasure(int n, std::vector<Stage> stages);

  /// Standard Gaussian (single atom at the origin).
  static GaussianMixtureMeasure pure_gaussian(int n);
  /// Single stage with the given centres (rows), each paired with its negative.
  static GaussianMixtureMeasure from_centres(const Matrix& centres);

  int dim() const { return n_; }
  const std::vector<Stage>& stages() const { return stages_; }
  /// Number of centre pairs +-z (N1 N2, N, or 1).
  std::size_t pair_count() const;

  DotProfile profile(const UnitVector& xi) const;
  DotProfile profile(const Vector& v) const;

  /// Density g(x), evaluated exactly in log space; exactly even in x.
  double density(const Vector& x) const;
  double log_density(const Vector& x) const;

  /// All centres z (one of each +-pair) as rows. Throws ResourceError past `cap`.
  Matrix explicit_centres(std::size_t cap = 100000) const;

  /// Centre of pair (i, j); j is ignored for single-stage measures.
  Vector centre(std::size_t i, std::size_t j) const;
  /// Uniform pair index and sign, plus a standard Gaussian.
  Vector sample(Rng& rng) const;

 private:
  int n_;
  std::vector<Stage> stages_;
};

}  // namespace slicing
