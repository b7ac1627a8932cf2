#include "slicing/cli/experiments.hpp"

#include <algorithm>
#include <cmath>

#include "slicing/errors.hpp"

namespace slicing::cli {

ScheduleMode parse_schedule_mode(const std::string& text) {
  if (text == "paper") return ScheduleMode::Paper;
  if (text == "desk") return ScheduleMode::Desk;
  throw DomainError("unknown schedule mode: " + text);
}

Construction construct(const BodySpec& spec, std::uint64_t seed) {
  const Rng rng(seed);
  if (spec.kind == BodyKind::TwoStage) {
    const TwoStageSchedule s = spec.mode == ScheduleMode::Paper ? paper_schedule_two_stage(spec.n)
                                                                : desk_schedule_two_stage(spec.n, spec.overrides);
    return build_two_stage(s, rng, spec.cap);
  }
  const PsiSchedule s = spec.mode == ScheduleMode::Paper ? paper_schedule_psi(spec.n, spec.alpha, spec.cap)
                                                         : desk_schedule_psi(spec.n, spec.alpha, spec.overrides);
  return build_psi_alpha(s, rng, spec.cap);
}

Rng maximizer_rng(std::uint64_t seed) { return Rng(seed).substream(7); }
Rng volume_rng(std::uint64_t seed) { return Rng(seed).substream(8); }
Rng check_rng(std::uint64_t seed) { return Rng(seed).substream(9); }

double loglog_slope(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) throw DomainError("slope fit needs at least two points");
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += std::log(x[i]);
    my += std::log(y[i]);
  }
  mx /= x.size();
  my /= y.size();
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = std::log(x[i]) - mx;
    sxy += dx * (std::log(y[i]) - my);
    sxx += dx * dx;
  }
  if (sxx == 0.0) throw DomainError("slope fit needs distinct x values");
  return sxy / sxx;
}

double normalized_constant(BodyKind kind, int n, double alpha, double M) {
  const double dn = n;
  if (kind == BodyKind::TwoStage) return M * std::sqrt(dn) / std::sqrt(std::log(std::log(dn)));
  return M * std::pow(dn, (2.0 - alpha) / 4.0);
}

double target_slope(BodyKind kind, double alpha) {
  return kind == BodyKind::TwoStage ? -0.5 : -(2.0 - alpha) / 4.0;
}

double truncation_scale(BodyKind kind) { return kind == BodyKind::TwoStage ? 4.0 : 3.0; }

ScalingStudy run_scaling(const ScalingOptions& o) {
  if (o.ns.size() < 3) throw DomainError("scaling needs at least three dimensions");
  ScalingStudy study;
  study.kind = o.body.kind;
  study.alpha = o.body.kind == BodyKind::PsiAlpha ? o.body.alpha : 0.0;
  for (int n : o.ns) {
    BodySpec spec = o.body;
    spec.n = n;
    const Construction c = construct(spec, o.seed);
    ScalingPoint p;
    p.n = n;
    p.maximizer = maximize_section(c.measure, o.maximize, maximizer_rng(o.seed));
    p.M = p.maximizer.value;
    p.net_value = p.maximizer.net_stage_value;
    p.normalized = normalized_constant(study.kind, n, o.body.alpha, p.M);
    if (o.volume) {
      const VolumeBracket b = volume_bracket(c.body.generators(), o.volume_scale, o.volume_samples, volume_rng(o.seed));
      p.bracket_lo = b.lower;
      p.bracket_hi = b.upper;
      p.truncated_root = truncation_scale(study.kind) * b.upper;
    }
    study.points.push_back(std::move(p));
  }
  std::vector<double> xs, ys, norms;
  for (const auto& p : study.points) {
    xs.push_back(p.n);
    ys.push_back(p.M);
    norms.push_back(p.normalized);
  }
  study.slope = loglog_slope(xs, ys);
  study.normalized_spread = *std::max_element(norms.begin(), norms.end()) / *std::min_element(norms.begin(), norms.end());
  return study;
}

CsvTable scaling_table(const ScalingStudy& study) {
  CsvTable table({"n", "kind", "alpha", "M", "net_value", "bracket_lo", "bracket_hi", "truncated_root", "normalized"});
  for (const auto& p : study.points)
    table.add_row({std::to_string(p.n), to_string(study.kind), format_number(study.alpha), format_number(p.M),
                   format_number(p.net_value), format_number(p.bracket_lo), format_number(p.bracket_hi),
                   format_number(p.truncated_root), format_number(p.normalized)});
  return table;
}

}  // namespace slicing::cli
