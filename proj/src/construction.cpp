#include "slicing/construction.hpp"

#include <cmath>
#include <numbers>

#include "slicing/errors.hpp"
#include "slicing/parallel.hpp"

namespace slicing {

std::string to_string(BodyKind kind) { return kind == BodyKind::TwoStage ? "two-stage" : "psi-alpha"; }

BodyKind parse_body_kind(const std::string& text) {
  if (text == "two-stage") return BodyKind::TwoStage;
  if (text == "psi-alpha" || text == "psi") return BodyKind::PsiAlpha;
  throw DomainError("unknown body kind: " + text);
}

namespace {

void flag_regime(TwoStageSchedule& s) {
  s.regime_warning = s.R2 > s.n || s.R1 <= std::sqrt(static_cast<double>(s.n));
}

double positive(const std::optional<double>& value, double fallback, const char* name) {
  if (!value) return fallback;
  if (!(*value > 0.0) || !std::isfinite(*value)) throw DomainError(std::string("override ") + name + " must be positive");
  return *value;
}

std::uint64_t count(const std::optional<double>& value, std::uint64_t fallback, const char* name) {
  const double v = positive(value, static_cast<double>(fallback), name);
  if (v != std::floor(v) || v > 9007199254740992.0) throw DomainError(std::string("override ") + name + " must be an integer");
  return static_cast<std::uint64_t>(v);
}

std::shared_ptr<const Matrix> sample_directions(int n, std::uint64_t count, Rng rng) {
  auto dirs = std::make_shared<Matrix>(static_cast<Eigen::Index>(count), n);
  for (std::uint64_t i = 0; i < count; ++i) dirs->row(static_cast<Eigen::Index>(i)) = sample_sphere(n, rng).coords().transpose();
  return dirs;
}

void check_dimension(int n) {
  if (n < 3) throw DomainError("dimension must be >= 3");
}

}  // namespace

TwoStageSchedule paper_schedule_two_stage(int n) {
  if (n <= 2) throw DomainError("two-stage schedule needs n >= 3 (log log n must be positive)");
  const double dn = n;
  const double ln = std::log(dn);
  TwoStageSchedule s;
  s.n = n;
  s.N1 = static_cast<std::uint64_t>(n) * n * n;
  s.N2 = static_cast<std::uint64_t>(std::ceil(dn * ln * ln * ln));
  s.R1 = dn / std::sqrt(ln);
  s.R2 = dn / std::sqrt(std::log(ln));
  flag_regime(s);
  return s;
}

PsiSchedule paper_schedule_psi(int n, double alpha, double cap) {
  check_dimension(n);
  if (!(alpha > 0.0 && alpha <= 2.0)) throw DomainError("alpha must lie in (0, 2]");
  const double dn = n;
  PsiSchedule s;
  s.n = n;
  s.alpha = alpha;
  s.log_N = 8.0 * std::log(dn) + 8.0 * std::pow(dn, 0.5 * alpha);
  s.N = std::ceil(std::exp(s.log_N));
  s.R = std::pow(dn, 1.0 - 0.25 * alpha);
  s.infeasible = !(s.N <= cap);
  return s;
}

TwoStageSchedule desk_schedule_two_stage(int n, const ScheduleOverrides& o) {
  TwoStageSchedule s = paper_schedule_two_stage(n);
  s.N1 = count(o.N1, s.N1, "N1");
  s.N2 = count(o.N2, s.N2, "N2");
  s.R1 = positive(o.R1, s.R1, "R1");
  s.R2 = positive(o.R2, s.R2, "R2");
  flag_regime(s);
  return s;
}

PsiSchedule desk_schedule_psi(int n, double alpha, const ScheduleOverrides& o) {
  check_dimension(n);
  if (!(alpha > 0.0 && alpha <= 2.0)) throw DomainError("alpha must lie in (0, 2]");
  PsiSchedule s;
  s.n = n;
  s.alpha = alpha;
  s.N = static_cast<double>(count(o.N, 200 * static_cast<std::uint64_t>(n), "N"));
  s.log_N = std::log(s.N);
  s.R = positive(o.R, std::pow(static_cast<double>(n), 1.0 - 0.25 * alpha), "R");
  s.infeasible = false;
  return s;
}

std::size_t CounterexampleBody::generator_count() const {
  const std::size_t e = etas ? etas->rows() : 0;
  return 2 * (static_cast<std::size_t>(thetas->rows()) + e + n);
}

double CounterexampleBody::R1() const {
  if (const auto* s = std::get_if<TwoStageSchedule>(&schedule)) return s->R1;
  return std::get<PsiSchedule>(schedule).R;
}

double CounterexampleBody::R2() const {
  if (const auto* s = std::get_if<TwoStageSchedule>(&schedule)) return s->R2;
  return 0.0;
}

GeneratorSet CounterexampleBody::generators() const {
  const Eigen::Index n1 = thetas->rows();
  const Eigen::Index n2 = etas ? etas->rows() : 0;
  GeneratorSet g;
  g.half.resize(n, n1 + n2 + n);
  g.half.leftCols(n1) = R1() * thetas->transpose();
  if (n2 > 0) g.half.middleCols(n1, n2) = R2() * etas->transpose();
  g.half.rightCols(n) = static_cast<double>(n) * Matrix::Identity(n, n);
  return g;
}

Construction build_two_stage(const TwoStageSchedule& s, const Rng& rng, double cap) {
  check_dimension(s.n);
  if (s.N1 < 1 || s.N2 < 1 || !(s.R1 > 0.0) || !(s.R2 > 0.0)) throw DomainError("invalid two-stage schedule");
  if (static_cast<double>(s.N1) + static_cast<double>(s.N2) > cap) throw ResourceError("atom directions exceed the cap");
  CounterexampleBody body;
  body.kind = BodyKind::TwoStage;
  body.n = s.n;
  body.schedule = s;
  body.seed = rng.seed();
  body.thetas = sample_directions(s.n, s.N1, rng.substream(0));
  body.etas = sample_directions(s.n, s.N2, rng.substream(1));
  return {body, measure_of(body)};
}

Construction build_psi_alpha(const PsiSchedule& s, const Rng& rng, double cap) {
  check_dimension(s.n);
  if (s.infeasible || !(s.N <= cap))
    throw InfeasibleSchedule("psi-alpha atom count " + std::to_string(s.N) +
                             " exceeds the materialization cap; use the desk schedule (N = 200 n)");
  if (!(s.N >= 1.0) || !(s.R > 0.0)) throw DomainError("invalid psi-alpha schedule");
  CounterexampleBody body;
  body.kind = BodyKind::PsiAlpha;
  body.n = s.n;
  body.schedule = s;
  body.seed = rng.seed();
  body.thetas = sample_directions(s.n, static_cast<std::uint64_t>(s.N), rng.substream(0));
  body.etas = std::make_shared<const Matrix>(0, s.n);
  return {body, measure_of(body)};
}

GaussianMixtureMeasure measure_of(const CounterexampleBody& body) {
  std::vector<Stage> stages{{body.R1(), body.thetas}};
  if (body.kind == BodyKind::TwoStage) stages.push_back({body.R2(), body.etas});
  return {body.n, std::move(stages)};
}

bool TruncatedDensity::contains(const Vector& x) const { return hull_membership(*body, x / scale); }

TruncatedDensity truncate_density(const GaussianMixtureMeasure& measure, const GeneratorSet& body,
                                  double scale, std::size_t samples, const Rng& rng) {
  if (!(scale > 0.0)) throw DomainError("truncate_density: scale must be positive");
  if (samples == 0) throw DomainError("truncate_density: samples must be positive");
  if (body.dim() != measure.dim()) throw DomainError("truncate_density: dimension mismatch");
  TruncatedDensity out{measure, std::make_shared<const GeneratorSet>(body), scale, 0.0, 0.0, samples};
  constexpr std::size_t kBlock = 256;
  const std::size_t blocks = (samples + kBlock - 1) / kBlock;
  std::vector<std::size_t> inside(blocks, 0);
  parallel_for(blocks, [&](std::size_t b) {
    Rng local = rng.substream(b);
    const std::size_t end = std::min(samples, (b + 1) * kBlock);
    for (std::size_t k = b * kBlock; k < end; ++k)
      if (out.contains(measure.sample(local))) ++inside[b];
  });
  std::size_t hits = 0;
  for (auto h : inside) hits += h;
  const double m = static_cast<double>(hits) / static_cast<double>(samples);
  out.mass_estimate = m;
  // Add-one proportion keeps the error positive when every draw lands inside.
  const double adj = (static_cast<double>(hits) + 1.0) / (static_cast<double>(samples) + 2.0);
  out.mass_se = std::sqrt(adj * (1.0 - adj) / static_cast<double>(samples));
  if (m - 3.0 * out.mass_se <= 0.0) throw DegenerateTruncation("mu(sK) is indistinguishable from zero");
  return out;
}

}  // namespace slicing
