#include "slicing/sections.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <mutex>
#include <numbers>
#include <numeric>

#include "slicing/errors.hpp"
#include "slicing/parallel.hpp"
#include "slicing/section_kernel.hpp"

namespace slicing {

namespace {

const double kInvRoot2Pi = 1.0 / std::sqrt(2.0 * std::numbers::pi);

// Restarts given an exact polish after an approximate ascent, and its budget.
constexpr std::size_t kPolished = 4;
constexpr std::size_t kPolishBudget = 25;

double scale_of(const DotProfile& p) { return 0.5 * kInvRoot2Pi / static_cast<double>(p.pairs()); }

// FFTW planning is not thread safe.
std::mutex& fftw_mutex() {
  static std::mutex m;
  return m;
}

// Linear convolution of two nonnegative integer count vectors.
std::vector<double> convolve_counts(const std::vector<double>& x, const std::vector<double>& y) {
  const std::size_t out_len = x.size() + y.size() - 1;
  std::vector<double> out(out_len, 0.0);
  if (x.size() * y.size() <= (std::size_t{1} << 16)) {
    for (std::size_t i = 0; i < x.size(); ++i) {
      if (x[i] == 0.0) continue;
      for (std::size_t j = 0; j < y.size(); ++j) out[i + j] += x[i] * y[j];
    }
    return out;
  }
  std::size_t len = 1;
  while (len < out_len) len <<= 1;
  const std::size_t spectrum = len / 2 + 1;
  double* rx = fftw_alloc_real(len);
  double* ry = fftw_alloc_real(len);
  fftw_complex* cx = fftw_alloc_complex(spectrum);
  fftw_complex* cy = fftw_alloc_complex(spectrum);
  fftw_plan fx, fy, back;
  {
    std::lock_guard lock(fftw_mutex());
    fx = fftw_plan_dft_r2c_1d(static_cast<int>(len), rx, cx, FFTW_ESTIMATE);
    fy = fftw_plan_dft_r2c_1d(static_cast<int>(len), ry, cy, FFTW_ESTIMATE);
    back = fftw_plan_dft_c2r_1d(static_cast<int>(len), cx, rx, FFTW_ESTIMATE);
  }
  std::fill(rx, rx + len, 0.0);
  std::fill(ry, ry + len, 0.0);
  std::copy(x.begin(), x.end(), rx);
  std::copy(y.begin(), y.end(), ry);
  fftw_execute(fx);
  fftw_execute(fy);
  for (std::size_t k = 0; k < spectrum; ++k) {
    const double re = cx[k][0] * cy[k][0] - cx[k][1] * cy[k][1];
    const double im = cx[k][0] * cy[k][1] + cx[k][1] * cy[k][0];
    cx[k][0] = re;
    cx[k][1] = im;
  }
  fftw_execute(back);
  // Counts are integers; rounding removes the transform noise.
  for (std::size_t k = 0; k < out_len; ++k) out[k] = std::max(0.0, std::round(rx[k] / static_cast<double>(len)));
  {
    std::lock_guard lock(fftw_mutex());
    fftw_destroy_plan(fx);
    fftw_destroy_plan(fy);
    fftw_destroy_plan(back);
  }
  fftw_free(rx);
  fftw_free(ry);
  fftw_free(cx);
  fftw_free(cy);
  return out;
}

struct Histogram {
  double origin = 0.0;
  std::vector<double> counts;
  bool exact = true;
};

Histogram histogram(const std::vector<double>& v, double h) {
  const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
  Histogram out;
  out.origin = *lo;
  if (*hi == *lo || h == 0.0) {
    out.counts.assign(1, static_cast<double>(v.size()));
    out.exact = *hi == *lo;
    return out;
  }
  const auto cells = static_cast<std::size_t>(std::ceil((*hi - *lo) / h)) + 1;
  out.counts.assign(cells, 0.0);
  for (double x : v) {
    const auto k = std::min(cells - 1, static_cast<std::size_t>(std::llround((x - *lo) / h)));
    out.counts[k] += 1.0;
  }
  out.exact = false;
  return out;
}

Vector tangent_step(const UnitVector& xi, const Vector& g) { return g - xi.dot(g) * xi.coords(); }

struct Candidate {
  UnitVector xi;
  std::string source;
};

struct Scored {
  double value = -1.0;
  double t = 0.0;
};

struct AscentResult {
  UnitVector xi{Vector::Ones(1)};
  double t = 0.0;
  double value = 0.0;
  std::size_t iters = 0;
  std::size_t evals = 0;
};

bool lexicographically_less(const Vector& x, const Vector& y) {
  return std::lexicographical_compare(x.data(), x.data() + x.size(), y.data(), y.data() + y.size());
}

// Cubic Hermite table of S(x) = sum_j phi(x + y_j) and S' on uniform nodes.
class NodeTable {
 public:
  NodeTable(const std::vector<double>& y, double lo, double hi, double h) : lo_(lo), h_(h) {
    const auto count = std::max<std::size_t>(2, static_cast<std::size_t>(std::ceil((hi - lo) / h)) + 1);
    std::vector<double> x(count);
    for (std::size_t m = 0; m < count; ++m) x[m] = lo + static_cast<double>(m) * h;
    s0_.resize(count);
    s1_.resize(count);
    s2_.resize(count);
    kernel::phi_sum_nodes(y.data(), y.size(), x.data(), count, s0_.data(), s1_.data(), s2_.data());
  }

  double value(double x) const { return interpolate(x, s0_, s1_); }
  double slope(double x) const { return interpolate(x, s1_, s2_); }

 private:
  double interpolate(double x, const std::vector<double>& f, const std::vector<double>& df) const {
    const double u = std::clamp((x - lo_) / h_, 0.0, static_cast<double>(f.size() - 1));
    const std::size_t k = std::min(f.size() - 2, static_cast<std::size_t>(u));
    const double r = u - static_cast<double>(k);
    const double r2 = r * r, r3 = r2 * r;
    return (2 * r3 - 3 * r2 + 1) * f[k] + (r3 - 2 * r2 + r) * h_ * df[k] + (3 * r2 - 2 * r3) * f[k + 1] +
           (r3 - r2) * h_ * df[k + 1];
  }

  double lo_, h_;
  std::vector<double> s0_, s1_, s2_;
};

// Approximate value and gradient for two-stage measures in O(N1 + N2) per
// call. The shorter profile is tabulated at nodes 0.05 apart; the longer one
// is spread onto a 0.01 grid with linear weights for the column sums. Used
// only to steer the ascent; reported values are always exact.
class ApproxEvaluator {
 public:
  explicit ApproxEvaluator(const GaussianMixtureMeasure& measure) : measure_(measure) {}

  double value(const UnitVector& xi, double t) const {
    const DotProfile p = measure_.profile(xi);
    const bool a_long = p.a.size() >= p.b.size();
    const auto& x = a_long ? p.a : p.b;
    const NodeTable table = make_table(a_long ? p.b : p.a, x, t);
    double total = 0.0;
    for (double v : x) total += table.value(t + v) + table.value(v - t);
    return scale_of(p) * total;
  }

  SectionGradient gradient(const UnitVector& xi, double t) const {
    const DotProfile p = measure_.profile(xi);
    const bool a_long = p.a.size() >= p.b.size();
    const auto& x = a_long ? p.a : p.b;
    const auto& y = a_long ? p.b : p.a;
    const NodeTable table = make_table(y, x, t);
    std::vector<double> row(x.size());
    double total = 0.0, dt = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double up = table.slope(t + x[i]), um = table.slope(x[i] - t);
      total += table.value(t + x[i]) + table.value(x[i] - t);
      row[i] = up + um;
      dt += up - um;
    }
    // Column sums sum_i phi'(q + x_i) at q = t + y_j and y_j - t.
    const double h = 0.01;
    const double lo = *std::min_element(x.begin(), x.end());
    std::vector<double> weights;
    for (double v : x) {
      const double u = (v - lo) / h;
      const auto k = static_cast<std::size_t>(u);
      const double r = u - static_cast<double>(k);
      if (weights.size() < k + 2) weights.resize(k + 2, 0.0);
      weights[k] += 1.0 - r;
      weights[k + 1] += r;
    }
    std::vector<double> centres, w;
    for (std::size_t k = 0; k < weights.size(); ++k) {
      if (weights[k] == 0.0) continue;
      centres.push_back(lo + static_cast<double>(k) * h);
      w.push_back(weights[k]);
    }
    std::vector<double> queries(2 * y.size()), sums(2 * y.size());
    for (std::size_t j = 0; j < y.size(); ++j) {
      queries[2 * j] = t + y[j];
      queries[2 * j + 1] = y[j] - t;
    }
    kernel::weighted_slope_sums(centres.data(), w.data(), centres.size(), queries.data(), queries.size(), sums.data());
    std::vector<double> col(y.size());
    for (std::size_t j = 0; j < y.size(); ++j) col[j] = sums[2 * j] + sums[2 * j + 1];

    const double scale = scale_of(p);
    SectionGradient g;
    g.value = scale * total;
    g.dt = scale * dt;
    const auto& stages = measure_.stages();
    const std::vector<double>& ga = a_long ? row : col;
    const std::vector<double>& gb = a_long ? col : row;
    const Eigen::Map<const Vector> ra(ga.data(), static_cast<Eigen::Index>(ga.size()));
    const Eigen::Map<const Vector> rb(gb.data(), static_cast<Eigen::Index>(gb.size()));
    g.grad_xi = stages[0].radius * (stages[0].dirs->transpose() * ra) + stages[1].radius * (stages[1].dirs->transpose() * rb);
    g.grad_xi = tangent_step(xi, scale * g.grad_xi);
    return g;
  }

 private:
  static NodeTable make_table(const std::vector<double>& y, const std::vector<double>& x, double t) {
    const auto [lo, hi] = std::minmax_element(x.begin(), x.end());
    return NodeTable(y, *lo - std::abs(t) - 0.1, *hi + std::abs(t) + 0.1, 0.05);
  }

  const GaussianMixtureMeasure& measure_;
};

// Projected ascent on (xi, t) with normalized steps and halving line search;
// only improving steps are taken.
template <class ValueFn, class GradFn>
AscentResult ascend(int n, const UnitVector& start, double t0, double t_scale, std::size_t budget, ValueFn value,
                    GradFn gradient) {
  AscentResult r{start, t0, value(start, t0), 0, 1};
  const double step0 = 0.1 / std::sqrt(static_cast<double>(n));
  double step = step0;
  for (std::size_t iter = 0; iter < budget; ++iter) {
    const SectionGradient g = gradient(r.xi, r.t);
    ++r.evals;
    const double gt = t_scale * g.dt;
    const double norm = std::sqrt(g.grad_xi.squaredNorm() + gt * gt);
    if (!(norm > 1e-300)) break;
    bool accepted = false;
    step = std::min(step0, 4.0 * step);
    while (step > 1e-10) {
      Vector trial = r.xi.coords() + (step / norm) * g.grad_xi;
      const double trial_t = r.t + t_scale * (step / norm) * gt;
      UnitVector trial_xi(std::move(trial));
      const double v = value(trial_xi, trial_t);
      ++r.evals;
      if (v > r.value) {
        r.xi = std::move(trial_xi);
        r.t = trial_t;
        r.value = v;
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    r.iters = iter + 1;
    if (!accepted) break;
  }
  r.t = std::abs(r.t);
  return r;
}

AscentResult ascend_exact(const GaussianMixtureMeasure& measure, const UnitVector& start, double t0, double t_scale,
                          std::size_t budget) {
  return ascend(
      measure.dim(), start, t0, t_scale, budget,
      [&](const UnitVector& xi, double t) { return section_value(measure, xi, t); },
      [&](const UnitVector& xi, double t) { return section_gradient(measure, xi, t); });
}

}  // namespace

double section_value(const DotProfile& p, double t) {
  return scale_of(p) * kernel::pair_sum(p.a.data(), p.a.size(), p.b.data(), p.b.size(), t);
}

double section_value(const GaussianMixtureMeasure& measure, const UnitVector& xi, double t) {
  if (xi.dim() != measure.dim()) throw DomainError("section_value: dimension mismatch");
  return section_value(measure.profile(xi), t);
}

BinnedSections section_value_binned(const DotProfile& p, std::span<const double> ts, std::size_t bins) {
  if (bins < 1) throw DomainError("section_value_binned: bins must be >= 1");
  if (p.a.empty() || p.b.empty()) throw DomainError("section_value_binned: empty profile");
  auto range = [](const std::vector<double>& v) {
    const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
    return *hi - *lo;
  };
  const double h = std::max(range(p.a), range(p.b)) / static_cast<double>(bins);
  const Histogram ha = histogram(p.a, h);
  const Histogram hb = histogram(p.b, h);
  const std::vector<double> conv = convolve_counts(ha.counts, hb.counts);
  std::vector<double> offsets, weights;
  const double origin = ha.origin + hb.origin;
  for (std::size_t k = 0; k < conv.size(); ++k) {
    if (conv[k] == 0.0) continue;
    offsets.push_back(origin + static_cast<double>(k) * h);
    weights.push_back(conv[k]);
  }
  BinnedSections out;
  out.bin_width = h;
  out.values.reserve(ts.size());
  const double scale = scale_of(p);
  for (double t : ts) out.values.push_back(scale * kernel::weighted_pair_sum(offsets.data(), weights.data(), offsets.size(), t));
  // Each offset moves by at most h/2 per rounded factor; both phi terms are
  // 1-Lipschitz, giving (shift) / sqrt(2 pi) on the normalized value.
  const double shift = (ha.exact ? 0.0 : 0.5 * h) + (hb.exact ? 0.0 : 0.5 * h);
  out.error_bound = shift * kInvRoot2Pi + 1e-13;
  return out;
}

SectionGradient section_gradient(const GaussianMixtureMeasure& measure, const UnitVector& xi, double t) {
  const DotProfile p = measure.profile(xi);
  std::vector<double> row(p.a.size()), col(p.b.size());
  double dt = 0.0;
  const double raw = kernel::pair_sum_grad(p.a.data(), p.a.size(), p.b.data(), p.b.size(), t, row.data(), col.data(), dt);
  const double scale = scale_of(p);
  SectionGradient g;
  g.value = scale * raw;
  g.dt = scale * dt;
  g.grad_xi = Vector::Zero(measure.dim());
  const auto& stages = measure.stages();
  if (!stages.empty()) {
    const Eigen::Map<const Vector> r(row.data(), static_cast<Eigen::Index>(row.size()));
    g.grad_xi += stages[0].radius * (stages[0].dirs->transpose() * r);
  }
  if (stages.size() > 1) {
    const Eigen::Map<const Vector> c(col.data(), static_cast<Eigen::Index>(col.size()));
    g.grad_xi += stages[1].radius * (stages[1].dirs->transpose() * c);
  }
  g.grad_xi = tangent_step(xi, scale * g.grad_xi);
  return g;
}

MaximizerReport maximize_section(const GaussianMixtureMeasure& measure, const MaximizeOptions& o, const Rng& rng) {
  if (o.ascent_budget == 0 || o.restarts == 0 || o.net_budget == 0 || o.bins == 0)
    throw DomainError("maximize_section: budgets must be positive");
  if (!(o.net_delta > 0.0) || o.t_bound < 0.0 || o.t_step < 0.0) throw DomainError("maximize_section: invalid parameters");
  const int n = measure.dim();
  double r_max = 0.0, r_sum = 0.0;
  for (const auto& s : measure.stages()) {
    const double r = s.radius * s.dirs->rowwise().norm().maxCoeff();
    r_max = std::max(r_max, r);
    r_sum += r;
  }
  const double t_scale = std::max(r_max, 1.0);
  const double t_step = o.t_step > 0.0 ? o.t_step : 0.05 * t_scale;
  const double t_bound = o.t_bound > 0.0 ? o.t_bound : r_sum + 3.0;
  std::vector<double> ts;
  for (double t = 0.0; t <= t_bound * (1.0 + 1e-12); t = ts.size() * t_step) ts.push_back(t);

  MaximizerReport report;
  Rng net_rng = rng.substream(0);
  const SphereNet net = build_sphere_net(n, o.net_delta, net_rng, o.net_budget, o.net_points);
  report.net_radius = net.verified_radius;
  std::vector<Candidate> candidates;
  for (const auto& p : net.points) candidates.push_back({p, "net"});
  for (const auto& s : measure.stages()) {
    const std::size_t take = std::min<std::size_t>(o.atom_seeds, s.size());
    for (std::size_t i = 0; i < take; ++i) {
      const Vector d = s.dirs->row(static_cast<Eigen::Index>(i)).transpose();
      if (d.norm() > 0.0) candidates.push_back({UnitVector(d), "atom"});
    }
  }
  report.candidates = candidates.size();

  const bool exact = measure.pair_count() <= o.exact_limit;
  std::vector<Scored> scores(candidates.size());
  parallel_for(candidates.size(), [&](std::size_t c) {
    const DotProfile p = measure.profile(candidates[c].xi);
    Scored best;
    if (exact) {
      for (double t : ts) {
        const double v = section_value(p, t);
        if (v > best.value) best = {v, t};
      }
    } else {
      const BinnedSections b = section_value_binned(p, ts, o.bins);
      for (std::size_t k = 0; k < ts.size(); ++k)
        if (b.values[k] > best.value) best = {b.values[k], ts[k]};
    }
    scores[c] = best;
  });
  report.budget_used = candidates.size() * ts.size();

  std::vector<std::size_t> order(candidates.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) { return scores[x].value > scores[y].value; });
  const std::size_t seeds = std::min(o.restarts, order.size());

  // Above the exact limit the ascent is steered by the approximate evaluator;
  // each end point is rescored exactly and the best few are polished exactly.
  const bool approx = !exact && measure.stages().size() == 2;
  const ApproxEvaluator fast(measure);
  std::vector<double> seed_values(seeds);
  std::vector<AscentResult> results(seeds);
  parallel_for(seeds, [&](std::size_t k) {
    const Candidate& c = candidates[order[k]];
    const double t = scores[order[k]].t;
    seed_values[k] = section_value(measure, c.xi, t);
    if (!approx) {
      results[k] = ascend_exact(measure, c.xi, t, t_scale, o.ascent_budget);
      return;
    }
    AscentResult r = ascend(
        n, c.xi, t, t_scale, o.ascent_budget, [&](const UnitVector& xi, double tt) { return fast.value(xi, tt); },
        [&](const UnitVector& xi, double tt) { return fast.gradient(xi, tt); });
    r.value = section_value(measure, r.xi, r.t);
    ++r.evals;
    if (r.value < seed_values[k]) {
      r.xi = c.xi;
      r.t = t;
      r.value = seed_values[k];
    }
    results[k] = std::move(r);
  });
  if (approx) {
    std::vector<std::size_t> rank(seeds);
    std::iota(rank.begin(), rank.end(), 0);
    std::stable_sort(rank.begin(), rank.end(), [&](std::size_t x, std::size_t y) { return results[x].value > results[y].value; });
    const std::size_t polish = std::min<std::size_t>(kPolished, seeds);
    parallel_for(polish, [&](std::size_t q) {
      AscentResult& r = results[rank[q]];
      const AscentResult p = ascend_exact(measure, r.xi, r.t, t_scale, std::min(o.ascent_budget, kPolishBudget));
      r.xi = p.xi;
      r.t = p.t;
      r.value = p.value;
      r.iters += p.iters;
      r.evals += p.evals;
    });
  }

  report.net_stage_value = *std::max_element(seed_values.begin(), seed_values.end());
  std::size_t best = 0;
  for (std::size_t k = 0; k < seeds; ++k) {
    const Candidate& c = candidates[order[k]];
    report.trace.push_back({c.source, "net", k, scores[order[k]].t, seed_values[k]});
    report.trace.push_back({c.source, "ascent", k, results[k].t, results[k].value});
    report.ascent_iters += results[k].iters;
    report.budget_used += results[k].evals;
    const bool better = results[k].value > results[best].value ||
                        (results[k].value == results[best].value &&
                         lexicographically_less(results[k].xi.coords(), results[best].xi.coords()));
    if (k > 0 && better) best = k;
  }
  report.best_xi = results[best].xi;
  report.best_t = results[best].t;
  report.value = section_value(measure, report.best_xi, report.best_t);
  report.best_source = candidates[order[best]].source;
  return report;
}

SectionEstimate truncated_section_estimate(const TruncatedDensity& density, const UnitVector& xi, double t,
                                           std::size_t samples, const Rng& rng) {
  const GaussianMixtureMeasure& measure = density.base;
  if (xi.dim() != measure.dim()) throw DomainError("truncated_section_estimate: dimension mismatch");
  if (samples == 0) throw DomainError("truncated_section_estimate: samples must be positive");
  const DotProfile p = measure.profile(xi);
  const std::size_t nb = p.b.size();
  // Pair (i, j) with sign s has centre s z_ij and hyperplane weight phi(t - s c_ij).
  std::vector<double> cumulative(p.a.size());
  double total = 0.0;
  for (std::size_t i = 0; i < p.a.size(); ++i) {
    double row = 0.0;
    for (double b : p.b) {
      const double c = p.a[i] + b;
      row += gaussian_phi(t - c) + gaussian_phi(t + c);
    }
    total += row;
    cumulative[i] = total;
  }
  if (!(total > 1e-300)) throw ZeroSection("hyperplane carries no mixture weight");

  const int n = measure.dim();
  constexpr std::size_t kBlock = 256;
  const std::size_t blocks = (samples + kBlock - 1) / kBlock;
  std::vector<std::size_t> inside(blocks, 0);
  parallel_for(blocks, [&](std::size_t blk) {
    Rng local = rng.substream(blk);
    std::vector<double> weights(2 * nb);
    const std::size_t end = std::min(samples, (blk + 1) * kBlock);
    for (std::size_t k = blk * kBlock; k < end; ++k) {
      const double u = local.uniform() * total;
      const std::size_t i = std::min<std::size_t>(
          p.a.size() - 1, std::upper_bound(cumulative.begin(), cumulative.end(), u) - cumulative.begin());
      double acc = 0.0;
      for (std::size_t j = 0; j < nb; ++j) {
        const double c = p.a[i] + p.b[j];
        acc += gaussian_phi(t - c);
        weights[2 * j] = acc;
        acc += gaussian_phi(t + c);
        weights[2 * j + 1] = acc;
      }
      const double v = local.uniform() * acc;
      const std::size_t pick =
          std::min<std::size_t>(2 * nb - 1, std::upper_bound(weights.begin(), weights.end(), v) - weights.begin());
      const double sign = pick % 2 == 0 ? 1.0 : -1.0;
      Vector x = sign * measure.centre(i, pick / 2);
      Vector g(n);
      for (int d = 0; d < n; ++d) g[d] = local.normal();
      x += g;
      x += (t - xi.dot(x)) * xi.coords();
      if (density.contains(x)) ++inside[blk];
    }
  });
  std::size_t hits = 0;
  for (auto h : inside) hits += h;
  SectionEstimate out;
  out.samples = samples;
  out.section = section_value(p, t);
  out.inside_fraction = static_cast<double>(hits) / static_cast<double>(samples);
  const double frac_se = std::sqrt(out.inside_fraction * (1.0 - out.inside_fraction) / static_cast<double>(samples));
  const double m = density.mass_estimate;
  out.estimate = out.section * out.inside_fraction / m;
  out.se = out.section / m * std::hypot(frac_se, out.inside_fraction * density.mass_se / m);
  return out;
}

double second_moment_direction(const GaussianMixtureMeasure& measure, const UnitVector& theta) {
  const DotProfile p = measure.profile(theta);
  auto mean = [](const std::vector<double>& v, bool square) {
    double s = 0.0;
    for (double x : v) s += square ? x * x : x;
    return s / static_cast<double>(v.size());
  };
  return 1.0 + mean(p.a, true) + 2.0 * mean(p.a, false) * mean(p.b, false) + mean(p.b, true);
}

SecondMomentCheck check_second_moment_bound(const GaussianMixtureMeasure& measure, const UnitVector& theta, double M) {
  if (!(M > 0.0)) throw DomainError("section supremum must be positive");
  SecondMomentCheck out;
  out.lhs = second_moment_direction(measure, theta);
  out.rhs = 1.0 / (12.0 * M * M);
  out.margin = out.lhs - out.rhs;
  out.pass = out.lhs >= out.rhs;
  return out;
}

}  // namespace slicing
