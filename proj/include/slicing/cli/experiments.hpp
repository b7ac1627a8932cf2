#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "slicing/cli/report.hpp"
#include "slicing/construction.hpp"
#include "slicing/sections.hpp"
#include "slicing/volume.hpp"

namespace slicing::cli {

enum class ScheduleMode { Paper, Desk };
ScheduleMode parse_schedule_mode(const std::string& text);

struct BodySpec {
  BodyKind kind = BodyKind::TwoStage;
  int n = 0;
  double alpha = 1.0;
  ScheduleMode mode = ScheduleMode::Desk;
  ScheduleOverrides overrides;
  double cap = kDefaultAtomCap;
};

/// Builds the body described by `spec`; throws InfeasibleSchedule for a psi body
/// on the `paper` schedule whose atom count exceeds the cap.
Construction construct(const BodySpec& spec, std::uint64_t seed);

/// Rng streams derived from a master seed, one per pipeline stage.
Rng maximizer_rng(std::uint64_t seed);
Rng volume_rng(std::uint64_t seed);
Rng check_rng(std::uint64_t seed);

/// Least-squares slope of log y against log x.
double loglog_slope(std::span<const double> x, std::span<const double> y);

/// M(n) sqrt(n) / sqrt(log log n) for two-stage, M(n) n^{(2 - alpha)/4} for psi.
double normalized_constant(BodyKind kind, int n, double alpha, double M);
/// Target exponent of M(n): -1/2 (two-stage), -(2 - alpha)/4 (psi).
double target_slope(BodyKind kind, double alpha);

struct ScalingPoint {
  int n = 0;
  double M = 0.0;
  double net_value = 0.0;
  double normalized = 0.0;
  double bracket_lo = 0.0;
  double bracket_hi = 0.0;
  /// |T|^{1/n} upper bound, T = s_trunc K (4 for two-stage, 3 for psi).
  double truncated_root = 0.0;
  MaximizerReport maximizer;
};

struct ScalingStudy {
  BodyKind kind = BodyKind::TwoStage;
  double alpha = 0.0;
  std::vector<ScalingPoint> points;
  double slope = 0.0;
  double normalized_spread = 0.0;  // max / min of the normalized constant
};

struct ScalingOptions {
  BodySpec body;
  std::vector<int> ns;
  MaximizeOptions maximize;
  std::uint64_t seed = 1;
  bool volume = true;
  double volume_scale = 5.0;
  std::size_t volume_samples = 20000;
};

ScalingStudy run_scaling(const ScalingOptions& options);
CsvTable scaling_table(const ScalingStudy& study);

/// Truncation scale used for a body kind: 4 (two-stage) or 3 (psi).
double truncation_scale(BodyKind kind);

}  // namespace slicing::cli
