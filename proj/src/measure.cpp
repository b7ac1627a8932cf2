#include "slicing/measure.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "slicing/errors.hpp"

namespace slicing {

GaussianMixtureMeasure::GaussianMixtureMeasure(int n, std::vector<Stage> stages)
    : n_(n), stages_(std::move(stages)) {
  if (n < 1) throw DomainError("measure dimension must be >= 1");
  if (stages_.size() > 2) throw DomainError("at most two atom stages are supported");
  for (const auto& s : stages_) {
    if (!s.dirs || s.dirs->rows() == 0) throw DomainError("empty atom stage");
    if (s.dirs->cols() != n) throw DomainError("atom stage dimension mismatch");
  }
}

GaussianMixtureMeasure GaussianMixtureMeasure::pure_gaussian(int n) { return {n, {}}; }

GaussianMixtureMeasure GaussianMixtureMeasure::from_centres(const Matrix& centres) {
  return {static_cast<int>(centres.cols()), {Stage{1.0, std::make_shared<const Matrix>(centres)}}};
}

std::size_t GaussianMixtureMeasure::pair_count() const {
  std::size_t count = 1;
  for (const auto& s : stages_) count *= s.size();
  return count;
}

DotProfile GaussianMixtureMeasure::profile(const UnitVector& xi) const { return profile(xi.coords()); }

DotProfile GaussianMixtureMeasure::profile(const Vector& v) const {
  if (v.size() != n_) throw DomainError("profile: dimension mismatch");
  DotProfile p;
  p.a.assign(1, 0.0);
  p.b.assign(1, 0.0);
  auto fill = [&](const Stage& s, std::vector<double>& out) {
    Vector d = *s.dirs * v;
    out.resize(d.size());
    for (Eigen::Index i = 0; i < d.size(); ++i) out[i] = s.radius * d[i];
  };
  if (!stages_.empty()) fill(stages_[0], p.a);
  if (stages_.size() > 1) fill(stages_[1], p.b);
  return p;
}

namespace {

// log cosh(u) without overflow; even in u.
double log_cosh(double u) {
  const double a = std::abs(u);
  return a + std::log1p(std::exp(-2.0 * a)) - std::numbers::ln2;
}

struct LogSum {
  double max = -std::numeric_limits<double>::infinity();
  double sum = 0.0;
  void add(double v) {
    if (v <= max) {
      sum += std::exp(v - max);
    } else {
      sum = sum * std::exp(max - v) + 1.0;
      max = v;
    }
  }
  double value() const { return max + std::log(sum); }
};

}  // namespace

double GaussianMixtureMeasure::log_density(const Vector& x) const {
  if (x.size() != n_) throw DomainError("density: dimension mismatch");
  const double base = -0.5 * n_ * std::log(2.0 * std::numbers::pi) -
                      std::log(static_cast<double>(pair_count())) - 0.5 * x.squaredNorm();
  if (stages_.empty()) return base;
  const DotProfile p = profile(x);
  LogSum acc;
  const Stage& s1 = stages_[0];
  const Vector norms1 = s1.dirs->rowwise().squaredNorm() * (s1.radius * s1.radius);
  if (stages_.size() == 1) {
    for (std::size_t i = 0; i < p.a.size(); ++i) acc.add(log_cosh(p.a[i]) - 0.5 * norms1[i]);
    return base + acc.value();
  }
  const Stage& s2 = stages_[1];
  const Vector norms2 = s2.dirs->rowwise().squaredNorm() * (s2.radius * s2.radius);
  const double cross = 2.0 * s1.radius * s2.radius;
  constexpr Eigen::Index kBlock = 256;
  const Eigen::Index n1 = s1.dirs->rows();
  for (Eigen::Index start = 0; start < n1; start += kBlock) {
    const Eigen::Index rows = std::min(kBlock, n1 - start);
    const Matrix gram = s1.dirs->middleRows(start, rows) * s2.dirs->transpose();
    for (Eigen::Index r = 0; r < rows; ++r) {
      const Eigen::Index i = start + r;
      for (Eigen::Index j = 0; j < gram.cols(); ++j) {
        const double z2 = norms1[i] + norms2[j] + cross * gram(r, j);
        acc.add(log_cosh(p.a[i] + p.b[j]) - 0.5 * z2);
      }
    }
  }
  return base + acc.value();
}

double GaussianMixtureMeasure::density(const Vector& x) const { return std::exp(log_density(x)); }

Vector GaussianMixtureMeasure::centre(std::size_t i, std::size_t j) const {
  Vector z = Vector::Zero(n_);
  if (!stages_.empty()) z += stages_[0].radius * stages_[0].dirs->row(static_cast<Eigen::Index>(i)).transpose();
  if (stages_.size() > 1) z += stages_[1].radius * stages_[1].dirs->row(static_cast<Eigen::Index>(j)).transpose();
  return z;
}

Matrix GaussianMixtureMeasure::explicit_centres(std::size_t cap) const {
  const std::size_t count = pair_count();
  if (count > cap) throw ResourceError("explicit atom enumeration exceeds the cap");
  Matrix out(static_cast<Eigen::Index>(count), n_);
  const std::size_t n2 = stages_.size() > 1 ? stages_[1].size() : 1;
  for (std::size_t m = 0; m < count; ++m) out.row(static_cast<Eigen::Index>(m)) = centre(m / n2, m % n2).transpose();
  return out;
}

Vector GaussianMixtureMeasure::sample(Rng& rng) const {
  Vector x(n_);
  for (int k = 0; k < n_; ++k) x[k] = rng.normal();
  if (stages_.empty()) return x;
  const std::size_t i = rng.below(stages_[0].size());
  const std::size_t j = stages_.size() > 1 ? rng.below(stages_[1].size()) : 0;
  const double sign = rng.uniform() < 0.5 ? -1.0 : 1.0;
  x += sign * centre(i, j);
  return x;
}

}  // namespace slicing
