#include "slicing/volume.hpp"

#include <Eigen/LU>
#include <Eigen/QR>
#include <cmath>
#include <limits>
#include <numbers>

#include "slicing/errors.hpp"
#include "slicing/parallel.hpp"

namespace slicing {

namespace {

constexpr double kMembershipTol = 1e-9;
constexpr std::size_t kColumnCap = 1000000;
constexpr std::size_t kBlock = 1024;

// Binomial standard error at the add-one estimate (k + 1) / (N + 2), so an
// all-hit or no-hit run still reports a positive width.
double binomial_se(std::size_t hits, std::size_t samples) {
  const double p = (static_cast<double>(hits) + 1.0) / (static_cast<double>(samples) + 2.0);
  return std::sqrt(p * (1.0 - p) / static_cast<double>(samples));
}
constexpr Eigen::Index kChunk = 128;

void check_dim(const GeneratorSet& body, const Vector& x) {
  if (x.size() != body.dim()) throw DomainError("dimension mismatch between point and body");
}

// Calls visit(sample_index, support value) for `samples` standard Gaussian
// (or uniform spherical, when `sphere`) draws, block-wise on substreams.
template <typename Visit>
void for_each_support(const GeneratorSet& body, std::size_t samples, const Rng& rng, bool sphere, Visit visit) {
  const int n = body.dim();
  const std::size_t blocks = (samples + kBlock - 1) / kBlock;
  parallel_for(blocks, [&](std::size_t b) {
    Rng local = rng.substream(b);
    const std::size_t begin = b * kBlock;
    const std::size_t end = std::min(samples, begin + kBlock);
    Matrix z(n, kChunk);
    for (std::size_t start = begin; start < end; start += kChunk) {
      const auto cols = static_cast<Eigen::Index>(std::min<std::size_t>(kChunk, end - start));
      for (Eigen::Index c = 0; c < cols; ++c) {
        for (int k = 0; k < n; ++k) z(k, c) = local.normal();
        if (sphere) z.col(c).normalize();
      }
      const Matrix dots = body.half.transpose() * z.leftCols(cols);
      for (Eigen::Index c = 0; c < cols; ++c) visit(start + c, dots.col(c).cwiseAbs().maxCoeff());
    }
  });
}

}  // namespace

GeneratorSet GeneratorSet::cross_polytope(int n, double scale) {
  if (n < 1 || !(scale > 0.0)) throw DomainError("cross_polytope: invalid arguments");
  return {scale * Matrix::Identity(n, n)};
}

double GeneratorSet::max_norm() const { return half.colwise().norm().maxCoeff(); }

double support(const GeneratorSet& body, const Vector& x) {
  check_dim(body, x);
  return (body.half.transpose() * x).cwiseAbs().maxCoeff();
}

bool polar_membership(const GeneratorSet& body, const Vector& x) { return support(body, x) <= 1.0 + 1e-12; }

GaugeResult hull_gauge(const GeneratorSet& body, const Vector& x, double threshold) {
  check_dim(body, x);
  if (2 * body.size() > kColumnCap) throw ResourceError("hull LP exceeds the column cap");
  const int n = body.dim();
  const Matrix& G = body.half;
  GaugeResult out;
  if (x.isZero(0.0)) return out;

  // Any nonsingular set of half generators is a feasible basis once each
  // column takes the sign of its coefficient.
  Eigen::ColPivHouseholderQR<Matrix> qr(G);
  if (qr.rank() < n) throw DomainError("hull LP: generators do not span the space");
  std::vector<Eigen::Index> basis(n);
  Vector sign = Vector::Ones(n);
  for (int k = 0; k < n; ++k) basis[k] = qr.colsPermutation().indices()[k];

  Matrix B(n, n);
  Vector xb(n);
  const Vector ones = Vector::Ones(n);
  bool bland = false;
  int stalled = 0;
  double last = std::numeric_limits<double>::infinity();
  constexpr int kMaxIterations = 20000;
  for (int iter = 0; iter < kMaxIterations; ++iter) {
    for (int k = 0; k < n; ++k) B.col(k) = sign[k] * G.col(basis[k]);
    Eigen::PartialPivLU<Matrix> lu(B);
    xb = lu.solve(x);
    for (int k = 0; k < n; ++k) {
      if (xb[k] < 0.0) {
        if (iter == 0) {
          sign[k] = -sign[k];
          B.col(k) = -B.col(k);
          xb[k] = -xb[k];
        } else {
          xb[k] = 0.0;
        }
      }
    }
    if (iter == 0) lu.compute(B);
    const double primal = xb.sum();
    const Vector pi = lu.transpose().solve(ones);
    const Vector prices = G.transpose() * pi;
    Eigen::Index enter = 0;
    const double top = prices.cwiseAbs().maxCoeff(&enter);
    out.value = primal;
    out.lower = top > 0.0 ? primal / top : 0.0;
    out.iterations = iter;
    if (threshold > 0.0) {
      if (primal <= threshold * (1.0 + kMembershipTol) || out.lower > threshold * (1.0 + kMembershipTol)) {
        out.early_exit = true;
        return out;
      }
    }
    if (top <= 1.0 + 1e-11) return out;

    if (primal < last * (1.0 - 1e-14)) {
      last = primal;
      stalled = 0;
    } else if (++stalled > 30) {
      bland = true;
    }
    if (bland) {
      for (Eigen::Index j = 0; j < prices.size(); ++j) {
        if (std::abs(prices[j]) > 1.0 + 1e-11) {
          enter = j;
          break;
        }
      }
    }
    const double s = prices[enter] > 0.0 ? 1.0 : -1.0;
    const Vector d = lu.solve(s * G.col(enter));
    int leave = -1;
    double ratio = std::numeric_limits<double>::infinity();
    for (int k = 0; k < n; ++k) {
      if (d[k] <= 1e-12) continue;
      const double r = xb[k] / d[k];
      const bool better = bland ? (r < ratio - 1e-15 || (r <= ratio + 1e-15 && leave >= 0 && basis[k] < basis[leave]))
                                : (r < ratio - 1e-15 || (r <= ratio + 1e-15 && leave >= 0 && d[k] > d[leave]));
      if (leave < 0 || better) {
        leave = k;
        ratio = r;
      }
    }
    if (leave < 0) throw NumericalError("hull LP: unbounded ratio test");
    basis[leave] = enter;
    sign[leave] = s;
  }
  throw NumericalError("hull LP: iteration limit reached");
}

bool hull_membership(const GeneratorSet& body, const Vector& x) {
  const GaugeResult g = hull_gauge(body, x, 1.0);
  return g.value <= 1.0 + kMembershipTol;
}

KsProduct ks_product(const GeneratorSet& body, double s) {
  if (!(s > 0.0)) throw DomainError("ks_product: s must be positive");
  const double sn = s * body.dim();
  KsProduct out;
  for (Eigen::Index j = 0; j < body.half.cols(); ++j) {
    const double norm = body.half.col(j).norm();
    if (norm == 0.0) continue;
    const double a = sn / norm;
    out.log_value += std::log1p(-std::erfc(a / std::numbers::sqrt2));
    out.log_crude += std::log1p(-std::exp(-0.5 * a * a));
  }
  out.value = std::exp(out.log_value);
  out.crude = std::exp(out.log_crude);
  return out;
}

McEstimate gaussian_polar_mc(const GeneratorSet& body, double s, std::size_t samples, const Rng& rng) {
  if (!(s > 0.0)) throw DomainError("gaussian_polar_mc: s must be positive");
  if (samples < 1000) throw DomainError("gaussian_polar_mc: needs at least 1000 samples");
  const double radius = s * body.dim();
  std::vector<unsigned char> hit(samples, 0);
  for_each_support(body, samples, rng, false, [&](std::size_t i, double h) { hit[i] = h <= radius; });
  std::size_t count = 0;
  for (auto h : hit) count += h;
  McEstimate out;
  out.samples = samples;
  out.estimate = static_cast<double>(count) / static_cast<double>(samples);
  out.se = binomial_se(count, samples);
  return out;
}

RadialPolarEstimate radial_polar_volume(const GeneratorSet& body, std::size_t samples, const Rng& rng) {
  if (samples < 2) throw DomainError("radial_polar_volume: needs at least 2 samples");
  const int n = body.dim();
  std::vector<double> logs(samples);
  for_each_support(body, samples, rng, true, [&](std::size_t i, double h) { logs[i] = -n * std::log(h); });
  const double top = *std::max_element(logs.begin(), logs.end());
  double sum = 0.0, sum2 = 0.0;
  for (double l : logs) {
    const double w = std::exp(l - top);
    sum += w;
    sum2 += w * w;
  }
  const double count = static_cast<double>(samples);
  const double mean = sum / count;
  const double var = std::max(0.0, (sum2 / count - mean * mean) * count / (count - 1.0));
  const double lower = mean - 3.0 * std::sqrt(var / count);
  RadialPolarEstimate out;
  out.samples = samples;
  out.log_mean = top + std::log(mean);
  out.log_lower = lower > 0.0 ? top + std::log(lower) : -std::numeric_limits<double>::infinity();
  return out;
}

VolumeBracket volume_bracket(const GeneratorSet& body, double s, std::size_t samples, const Rng& rng) {
  const int n = body.dim();
  const double log_ball = log_ball_volume(n);
  VolumeBracket out;
  out.ball_lower = std::exp(log_ball / n) * std::sqrt(static_cast<double>(n));
  out.lower = out.ball_lower;

  const KsProduct ks = ks_product(body, s);
  const McEstimate mc = gaussian_polar_mc(body, s, samples, rng.substream(0));
  out.ks_product = ks.value;
  out.gaussian_polar_estimate = mc.estimate;
  double log_gamma = ks.log_value;
  if (mc.ci_lo() > 0.0) log_gamma = std::max(log_gamma, std::log(mc.ci_lo()));
  const double inf = std::numeric_limits<double>::infinity();
  out.santalo_upper = inf;
  if (std::isfinite(log_gamma)) {
    const double log_k = 2.0 * log_ball + n * std::log(s * n) - 0.5 * n * std::log(2.0 * std::numbers::pi) - log_gamma;
    out.santalo_upper = std::exp(log_k / n);
  }
  const RadialPolarEstimate radial = radial_polar_volume(body, samples, rng.substream(1));
  out.radial_santalo_upper = inf;
  if (std::isfinite(radial.log_lower)) out.radial_santalo_upper = std::exp((log_ball - radial.log_lower) / n);
  out.upper = std::min(out.santalo_upper, out.radial_santalo_upper);
  if (!std::isfinite(out.upper)) throw BracketUnavailable("no polar-volume lower bound is positive");
  return out;
}

McEstimate mc_volume_small_n(const GeneratorSet& body, std::size_t samples, const Rng& rng) {
  const int n = body.dim();
  if (n > 6) throw DomainError("mc_volume_small_n: only n <= 6 is supported");
  if (samples == 0) throw DomainError("mc_volume_small_n: samples must be positive");
  const double r = body.max_norm();
  const double box = std::pow(2.0 * r, n);
  const std::size_t blocks = (samples + kBlock - 1) / kBlock;
  std::vector<std::size_t> inside(blocks, 0);
  parallel_for(blocks, [&](std::size_t b) {
    Rng local = rng.substream(b);
    const std::size_t end = std::min(samples, (b + 1) * kBlock);
    Vector x(n);
    for (std::size_t i = b * kBlock; i < end; ++i) {
      for (int k = 0; k < n; ++k) x[k] = r * (2.0 * local.uniform() - 1.0);
      if (hull_membership(body, x)) ++inside[b];
    }
  });
  std::size_t count = 0;
  for (auto c : inside) count += c;
  const double f = static_cast<double>(count) / static_cast<double>(samples);
  McEstimate out;
  out.samples = samples;
  out.estimate = f * box;
  out.se = box * binomial_se(count, samples);
  return out;
}

}  // namespace slicing
