#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <numbers>

#include "slicing/body_io.hpp"
#include "slicing/construction.hpp"
#include "slicing/errors.hpp"

namespace slicing {
namespace {

// Mixture density summed over every explicit centre.
double brute_density(const Matrix& centres, const Vector& x) {
  const int n = static_cast<int>(x.size());
  double sum = 0.0;
  for (Eigen::Index i = 0; i < centres.rows(); ++i) {
    const Vector z = centres.row(i).transpose();
    sum += std::exp(-0.5 * (x - z).squaredNorm()) + std::exp(-0.5 * (x + z).squaredNorm());
  }
  return sum / (2.0 * centres.rows()) / std::pow(2.0 * std::numbers::pi, 0.5 * n);
}

TEST(Schedule, TwoStageValues) {
  const auto s = paper_schedule_two_stage(5);
  EXPECT_EQ(s.N1, 125u);
  EXPECT_EQ(s.N2, 21u);
  EXPECT_NEAR(s.R1, 3.941, 1e-3);
  EXPECT_NEAR(s.R2, 7.248, 1e-3);
  EXPECT_TRUE(s.regime_warning);
  EXPECT_THROW(paper_schedule_two_stage(2), DomainError);
}

TEST(Schedule, PsiInfeasibleAtPaperValues) {
  const auto s = paper_schedule_psi(8, 1.0);
  EXPECT_TRUE(s.infeasible);
  EXPECT_NEAR(s.log_N, 8.0 * std::log(8.0) + 8.0 * std::sqrt(8.0), 1e-9);
  EXPECT_NEAR(s.R, std::pow(8.0, 0.75), 1e-12);
  Rng rng(1);
  EXPECT_THROW(build_psi_alpha(s, rng), InfeasibleSchedule);
}

TEST(Schedule, DeskOverrides) {
  ScheduleOverrides o;
  o.N2 = 7;
  o.R1 = 2.5;
  const auto s = desk_schedule_two_stage(6, o);
  EXPECT_EQ(s.N1, 216u);
  EXPECT_EQ(s.N2, 7u);
  EXPECT_DOUBLE_EQ(s.R1, 2.5);
  const auto p = desk_schedule_psi(10, 1.0);
  EXPECT_DOUBLE_EQ(p.N, 2000.0);
  EXPECT_FALSE(p.infeasible);
}

TEST(BodyKind, Parse) {
  EXPECT_EQ(parse_body_kind("two-stage"), BodyKind::TwoStage);
  EXPECT_EQ(parse_body_kind("psi-alpha"), BodyKind::PsiAlpha);
  EXPECT_EQ(to_string(BodyKind::PsiAlpha), "psi-alpha");
  EXPECT_THROW(parse_body_kind("cube"), Error);
}

TEST(Construction, TwoStageGenerators) {
  const auto c = build_two_stage(paper_schedule_two_stage(5), Rng(3));
  EXPECT_EQ(c.body.generator_count(), 302u);
  const GeneratorSet g = c.body.generators();
  EXPECT_EQ(g.half.cols(), 151);
  for (Eigen::Index i = 0; i < c.body.thetas->rows(); ++i) EXPECT_NEAR(c.body.thetas->row(i).norm(), 1.0, 1e-12);
  for (Eigen::Index i = 0; i < c.body.etas->rows(); ++i) EXPECT_NEAR(c.body.etas->row(i).norm(), 1.0, 1e-12);
  EXPECT_EQ(c.measure.pair_count(), 125u * 21u);
}

TEST(Construction, Reproducible) {
  const auto a = build_two_stage(paper_schedule_two_stage(6), Rng(11));
  const auto b = build_two_stage(paper_schedule_two_stage(6), Rng(11));
  const auto c = build_two_stage(paper_schedule_two_stage(6), Rng(12));
  EXPECT_EQ(*a.body.thetas, *b.body.thetas);
  EXPECT_EQ(*a.body.etas, *b.body.etas);
  EXPECT_NE(*a.body.thetas, *c.body.thetas);
}

TEST(Construction, AtomCap) {
  EXPECT_THROW(build_two_stage(paper_schedule_two_stage(6), Rng(1), 100.0), ResourceError);
}

TEST(Measure, DensityMatchesExplicitSum) {
  const auto c = build_two_stage(paper_schedule_two_stage(4), Rng(5));
  const Matrix centres = c.measure.explicit_centres();
  EXPECT_EQ(static_cast<std::size_t>(centres.rows()), c.measure.pair_count());
  Rng rng(6);
  for (int k = 0; k < 20; ++k) {
    Vector x(4);
    for (int i = 0; i < 4; ++i) x[i] = 3.0 * rng.normal();
    const double oracle = brute_density(centres, x);
    const double v = c.measure.density(x);
    EXPECT_NEAR(v / oracle, 1.0, 1e-9);
    EXPECT_DOUBLE_EQ(v, c.measure.density(-x));
  }
}

TEST(Measure, PureGaussian) {
  const auto g = GaussianMixtureMeasure::pure_gaussian(3);
  EXPECT_NEAR(g.density(Vector::Zero(3)), std::pow(2.0 * std::numbers::pi, -1.5), 1e-15);
  const DotProfile p = g.profile(UnitVector::basis(3, 0));
  EXPECT_EQ(p.pairs(), 1u);
}

TEST(Measure, SampleSecondMoment) {
  // E|X|^2 = n + E|z|^2 for the mixture.
  Matrix centres(2, 3);
  centres << 3, 0, 0, 0, 4, 0;
  const auto m = GaussianMixtureMeasure::from_centres(centres);
  Rng rng(9);
  const int count = 100000;
  double sum = 0.0;
  for (int i = 0; i < count; ++i) sum += m.sample(rng).squaredNorm();
  EXPECT_NEAR(sum / count, 3.0 + 12.5, 0.2);
}

TEST(Truncation, CrossPolytopeMass) {
  // conv(+-e_k) scaled by 100 holds essentially all Gaussian mass in R^3.
  const auto g = GaussianMixtureMeasure::pure_gaussian(3);
  const GeneratorSet k = GeneratorSet::cross_polytope(3, 1.0);
  const TruncatedDensity td = truncate_density(g, k, 100.0, 2000, Rng(2));
  EXPECT_NEAR(td.mass_estimate, 1.0, 1e-12);
  EXPECT_TRUE(td.contains(Vector::Constant(3, 33.0)));
  EXPECT_FALSE(td.contains(Vector::Constant(3, 34.0)));
  EXPECT_THROW(truncate_density(g, k, 1e-6, 500, Rng(2)), DegenerateTruncation);
}

TEST(BodyIo, RoundTrip) {
  const auto c = build_two_stage(paper_schedule_two_stage(5), Rng(21));
  const auto path = std::filesystem::temp_directory_path() / "slicing_body_roundtrip.json";
  save_body(c.body, path);
  const CounterexampleBody back = load_body(path);
  std::filesystem::remove(path);
  EXPECT_EQ(back.n, 5);
  EXPECT_EQ(back.seed, c.body.seed);
  EXPECT_EQ(*back.thetas, *c.body.thetas);
  EXPECT_EQ(*back.etas, *c.body.etas);
  EXPECT_DOUBLE_EQ(back.R1(), c.body.R1());
  EXPECT_EQ(body_to_json(back), body_to_json(c.body));
  EXPECT_THROW(body_from_json("{not json"), Error);
}

}  // namespace
}  // namespace slicing
