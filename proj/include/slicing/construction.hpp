#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <variant>

#include "slicing/measure.hpp"
#include "slicing/volume.hpp"

namespace slicing {

enum class BodyKind { TwoStage, PsiAlpha };

std::string to_string(BodyKind kind);
BodyKind parse_body_kind(const std::string& text);

struct TwoStageSchedule {
  int n = 0;
  std::uint64_t N1 = 0;
  std::uint64_t N2 = 0;
  double R1 = 0.0;
  double R2 = 0.0;
  /// R2 > n or R1 <= sqrt(n).
  bool regime_warning = false;
};

/// Default cap on materialized atom directions.
inline constexpr double kDefaultAtomCap = 1e7;

struct PsiSchedule {
  int n = 0;
  double alpha = 0.0;
  /// May exceed any integer type; exact below 2^53.
  double N = 0.0;
  double log_N = 0.0;
  double R = 0.0;
  bool infeasible = false;
};

using Schedule = std::variant<TwoStageSchedule, PsiSchedule>;

/// N1 = n^3, N2 = ceil(n log^3 n), R1 = n / sqrt(log n), R2 = n / sqrt(log log n).
TwoStageSchedule paper_schedule_two_stage(int n);

/// N = ceil(n^8 exp(8 n^{alpha/2})), R = n^{1 - alpha/4}.
PsiSchedule paper_schedule_psi(int n, double alpha, double cap = kDefaultAtomCap);

struct ScheduleOverrides {
  std::optional<double> N1, N2, R1, R2, N, R;
};

/// Two-stage defaults equal the `paper` schedule values.
TwoStageSchedule desk_schedule_two_stage(int n, const ScheduleOverrides& overrides = {});
/// Defaults N = 200 n, R = n^{1 - alpha/4}.
PsiSchedule desk_schedule_psi(int n, double alpha, const ScheduleOverrides& overrides = {});

struct CounterexampleBody {
  BodyKind kind = BodyKind::TwoStage;
  int n = 0;
  Schedule schedule;
  std::uint64_t seed = 0;
  std::shared_ptr<const Matrix> thetas;  // rows
  std::shared_ptr<const Matrix> etas;    // rows; empty for psi-alpha

  std::size_t generator_count() const;  // counts +-g separately
  /// Half generators: R1 theta_i, R2 eta_j, n e_k (or R Theta_i, n e_k).
  GeneratorSet generators() const;
  double R1() const;  // R for psi-alpha
  double R2() const;  // 0 for psi-alpha
};

struct Construction {
  CounterexampleBody body;
  GaussianMixtureMeasure measure;
};

/// Directions are drawn from rng.substream(0) (thetas) and rng.substream(1) (etas).
Construction build_two_stage(const TwoStageSchedule& schedule, const Rng& rng,
                             double cap = kDefaultAtomCap);
Construction build_psi_alpha(const PsiSchedule& schedule, const Rng& rng, double cap = kDefaultAtomCap);
/// Measure of a body, rebuilt from its stored directions.
GaussianMixtureMeasure measure_of(const CounterexampleBody& body);

struct TruncatedDensity {
  GaussianMixtureMeasure base;
  std::shared_ptr<const GeneratorSet> body;
  double scale = 0.0;
  double mass_estimate = 0.0;
  double mass_se = 0.0;
  std::size_t samples = 0;
  bool contains(const Vector& x) const;  // x in scale * K
};

/// Monte-Carlo mu(sK) from mixture draws; throws DegenerateTruncation when the
/// estimate minus 3 SE is not positive.
TruncatedDensity truncate_density(const GaussianMixtureMeasure& measure, const GeneratorSet& body,
                                  double scale, std::size_t samples, const Rng& rng);

}  // namespace slicing
