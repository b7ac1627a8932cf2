// Acceptance suite: one PASS/FAIL line per criterion. Optional arguments pick
// a subset of criteria by number.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <numbers>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "slicing/cli/experiments.hpp"
#include "slicing/concentration.hpp"
#include "slicing/construction.hpp"
#include "slicing/radon.hpp"
#include "slicing/sections.hpp"
#include "slicing/tails.hpp"
#include "slicing/volume.hpp"

namespace fs = std::filesystem;
using namespace slicing;
using cli::BodySpec;
using cli::ScheduleMode;
using cli::ScalingOptions;
using cli::ScalingStudy;

namespace {

constexpr std::uint64_t kSeed = 1;
const std::vector<int> kScalingNs{6, 10, 16, 24};
const std::vector<double> kAlphas{0.5, 1.0, 2.0};

std::string num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

struct Outcome {
  bool pass = false;
  std::string detail;
};

// Scaling studies are shared by several criteria and computed once.
class Studies {
 public:
  const ScalingStudy& two_stage() {
    if (!two_stage_) {
      const auto start = std::chrono::steady_clock::now();
      ScalingOptions o;
      o.body.kind = BodyKind::TwoStage;
      o.body.mode = ScheduleMode::Paper;
      o.ns = kScalingNs;
      o.seed = kSeed;
      o.maximize.restarts = 64;
      two_stage_ = cli::run_scaling(o);
      two_stage_seconds_ = seconds_since(start);
    }
    return *two_stage_;
  }
  double two_stage_seconds() const { return two_stage_seconds_; }

  const ScalingStudy& psi(double alpha) {
    auto it = psi_.find(alpha);
    if (it == psi_.end()) {
      ScalingOptions o;
      o.body = psi_spec(0, alpha);
      o.ns = kScalingNs;
      o.seed = kSeed;
      o.maximize.restarts = 64;
      o.volume = false;
      it = psi_.emplace(alpha, cli::run_scaling(o)).first;
    }
    return it->second;
  }

  static BodySpec two_stage_spec(int n) {
    BodySpec s;
    s.kind = BodyKind::TwoStage;
    s.mode = ScheduleMode::Paper;
    s.n = n;
    return s;
  }
  static BodySpec psi_spec(int n, double alpha) {
    BodySpec s;
    s.kind = BodyKind::PsiAlpha;
    s.mode = ScheduleMode::Desk;
    s.alpha = alpha;
    s.n = n;
    return s;
  }

 private:
  std::optional<ScalingStudy> two_stage_;
  double two_stage_seconds_ = 0.0;
  std::map<double, ScalingStudy> psi_;
};

Outcome criterion1(Studies& st) {
  const ScalingStudy& s = st.two_stage();
  std::string ms;
  for (const auto& p : s.points) ms += (ms.empty() ? "" : ",") + num(p.M);
  const bool slope_ok = s.slope >= -0.75 && s.slope <= -0.25;
  const bool spread_ok = s.normalized_spread <= 2.5;
  return {slope_ok && spread_ok, "slope=" + num(s.slope) + " in [-0.75,-0.25]; spread=" + num(s.normalized_spread) +
                                     " <= 2.5; M=" + ms + "; " + num(st.two_stage_seconds()) + " s"};
}

Outcome criterion2(Studies& st) {
  bool pass = true;
  std::string detail;
  for (double a : kAlphas) {
    const ScalingStudy& s = st.psi(a);
    const double target = cli::target_slope(BodyKind::PsiAlpha, a);
    pass = pass && std::abs(s.slope - target) <= 0.25;
    detail += "alpha=" + num(a) + " slope=" + num(s.slope) + " target=" + num(target) + "; ";
  }
  return {pass, detail + "desk schedule N=200n (`paper` schedule N is infeasible)"};
}

Outcome criterion3(Studies& st) {
  bool pass = true;
  std::string detail;
  for (double a : kAlphas) {
    st.psi(a);
    std::vector<double> betas;
    for (int n : kScalingNs) {
      const Construction c = cli::construct(Studies::psi_spec(n, a), kSeed);
      const TailEnvelope env = fit_envelope(c.measure, a, 0.05, 200, 20.0, 64, cli::check_rng(kSeed).substream(0));
      betas.push_back(env.beta);
    }
    const double hi = *std::max_element(betas.begin(), betas.end());
    const double lo = *std::min_element(betas.begin(), betas.end());
    pass = pass && hi <= 20.0 && hi / lo <= 2.0;
    detail += "alpha=" + num(a) + " beta max=" + num(hi) + " ratio=" + num(hi / lo) + "; ";
  }
  return {pass, detail + "need beta <= 20, ratio <= 2"};
}

Outcome criterion4(Studies& st) {
  const ScalingStudy& s = st.two_stage();
  double worst = 0.0;
  std::string roots;
  for (const auto& p : s.points) {
    worst = std::max(worst, p.truncated_root);
    roots += (roots.empty() ? "" : ",") + num(p.truncated_root);
  }
  const bool roots_ok = worst <= 40.0;

  const Construction c = cli::construct(Studies::two_stage_spec(4), kSeed);
  const GeneratorSet body = c.body.generators();
  const VolumeBracket b = volume_bracket(body, 5.0, 20000, cli::volume_rng(kSeed));
  const McEstimate mc = mc_volume_small_n(body, 40000, cli::check_rng(kSeed));
  const double root_hi = std::pow(mc.ci_hi(), 0.25);
  const double root_lo = std::pow(std::max(0.0, mc.ci_lo()), 0.25);
  const bool contains = b.lower <= root_hi && b.upper >= root_lo;
  return {roots_ok && contains, "|T|^(1/n) upper=" + roots + " (max " + num(worst) + " <= 40); n=4 bracket [" +
                                    num(b.lower) + "," + num(b.upper) + "] vs oracle " +
                                    num(std::pow(mc.estimate, 0.25)) + " +- 3 se"};
}

Outcome criterion5() {
  const auto start = std::chrono::steady_clock::now();
  const int n = 8;
  const double R = 4.0;
  bool pass = true;
  double worst = 0.0;
  std::size_t k = 0;
  for (double p : {0.05, 0.1, 0.3}) {
    // Cap offset where the mean of phi(t + R Z) equals p.
    double lo = 0.0, hi = 4.0 * R + 40.0;
    for (int it = 0; it < 200; ++it) {
      const double mid = 0.5 * (lo + hi);
      (cap_expectation(n, R, mid) > p ? lo : hi) = mid;
    }
    for (std::uint64_t N : {20u, 50u, 100u}) {
      for (const UnitSampler& s : {UnitSampler{samplers::Bernoulli{p}}, UnitSampler{samplers::CapPhi{n, R, hi}}}) {
        const DeviationReport r = bernstein_empirical(s, p, N, 100000, cli::check_rng(kSeed).substream(k++));
        const double rhs = r.bound + 3.0 * r.standard_error();
        pass = pass && r.rate() <= rhs;
        worst = std::max(worst, r.rate() / rhs);
      }
    }
  }
  const double secs = seconds_since(start);
  return {pass && secs <= 60.0, "18 runs, max rate/(bound+3se)=" + num(worst) + "; " + num(secs) + " s (<= 60)"};
}

Outcome criterion6() {
  const auto start = std::chrono::steady_clock::now();
  std::size_t points = 0, failures = 0;
  double worst = 1e300;
  for (int n = 4; n <= 64; ++n) {
    const double root = std::sqrt(static_cast<double>(n));
    const double r_lo = std::ceil(root) + 1.0, r_hi = n;
    for (int i = 0; i < 8; ++i) {
      const double R = r_hi > r_lo ? r_lo * std::pow(r_hi / r_lo, i / 7.0) : r_lo;
      for (int j = 0; j < 8; ++j) {
        const CapBoundCheck c = cap_expectation_bound_check(n, R, 3.0 * R / root * j / 7.0, 3.0, 0.3);
        ++points;
        failures += !c.pass;
        worst = std::min(worst, c.rhs / c.lhs);
      }
      if (r_hi <= r_lo) break;
    }
  }
  const double secs = seconds_since(start);
  return {failures == 0 && secs <= 60.0, std::to_string(points) + " points, " + std::to_string(failures) +
                                             " failures, min rhs/lhs=" + num(worst) + "; " + num(secs) + " s"};
}

Outcome criterion7() {
  bool pass = true;
  std::string detail;
  for (int n : {5, 6, 8}) {
    for (const BodySpec& spec : {Studies::two_stage_spec(n), Studies::psi_spec(n, 1.0)}) {
      BodySpec desk = spec;
      desk.mode = ScheduleMode::Desk;
      const Construction c = cli::construct(desk, kSeed);
      const double s = cli::truncation_scale(spec.kind);
      const TruncatedDensity td = truncate_density(c.measure, c.body.generators(), s, 10000, cli::check_rng(kSeed));
      const double lower = td.mass_estimate - 3.0 * td.mass_se;
      pass = pass && lower >= 0.5;
      detail += to_string(spec.kind) + " n=" + std::to_string(n) + " " + num(lower) + "; ";
    }
  }
  return {pass, "mass - 3se >= 0.5: " + detail};
}

Outcome criterion8() {
  Rng rng = cli::check_rng(kSeed).substream(8);
  double worst_rel = 0.0, worst_binned = 0.0;
  bool binned_ok = true;
  int query = 0;
  for (int n : {5, 6, 8}) {
    const Construction c = cli::construct(Studies::two_stage_spec(n), kSeed);
    const Matrix centres = c.measure.explicit_centres();
    const int count = n == 8 ? 34 : 33;
    for (int k = 0; k < count; ++k, ++query) {
      const UnitVector xi = sample_sphere(n, rng);
      const double t = (c.body.R1() + c.body.R2()) * (2.0 * rng.uniform() - 1.0);
      double brute = 0.0;
      for (Eigen::Index i = 0; i < centres.rows(); ++i) {
        const double d = xi.dot(centres.row(i).transpose());
        brute += gaussian_phi(t + d) + gaussian_phi(d - t);
      }
      brute /= 2.0 * static_cast<double>(centres.rows()) * std::sqrt(2.0 * std::numbers::pi);
      const double exact = section_value(c.measure, xi, t);
      worst_rel = std::max(worst_rel, std::abs(exact - brute) / brute);
      const double ts[] = {t};
      const BinnedSections b = section_value_binned(c.measure.profile(xi), ts, std::size_t{1} << 14);
      const double err = std::abs(b.values[0] - brute);
      binned_ok = binned_ok && err <= b.error_bound;
      worst_binned = std::max(worst_binned, err / b.error_bound);
    }
  }
  return {worst_rel <= 1e-10 && binned_ok, std::to_string(query) + " queries, max rel err=" + num(worst_rel) +
                                               " (<= 1e-10), max binned err/bound=" + num(worst_binned)};
}

struct MeasureWithM {
  std::string name;
  Construction c;
  double M;
};

std::vector<MeasureWithM> constructed_measures(Studies& st) {
  std::vector<MeasureWithM> out;
  for (const auto& p : st.two_stage().points)
    out.push_back({"two-stage n=" + std::to_string(p.n), cli::construct(Studies::two_stage_spec(p.n), kSeed), p.M});
  for (double a : kAlphas)
    for (const auto& p : st.psi(a).points)
      out.push_back({"psi a=" + num(a) + " n=" + std::to_string(p.n), cli::construct(Studies::psi_spec(p.n, a), kSeed),
                     p.M});
  return out;
}

Outcome criterion9(Studies& st) {
  bool pass = true, pass_2m = true;
  double worst = 1e300;
  std::size_t measures = 0;
  for (const auto& m : constructed_measures(st)) {
    ++measures;
    Rng rng = cli::check_rng(kSeed).substream(9);
    for (int k = 0; k < 1000; ++k) {
      const UnitVector theta = sample_sphere(m.c.body.n, rng);
      const SecondMomentCheck a = check_second_moment_bound(m.c.measure, theta, m.M);
      pass = pass && a.pass;
      pass_2m = pass_2m && check_second_moment_bound(m.c.measure, theta, 2.0 * m.M).pass;
      worst = std::min(worst, a.lhs / a.rhs);
    }
  }
  return {pass, std::to_string(measures) + " measures x 1000 theta, min lhs/rhs=" + num(worst) +
                    "; with 2M: " + (pass_2m ? "all pass" : "some fail")};
}

Outcome criterion10() {
  const RadonReport cross = verify_crosspolytope(3, 50, 1e-3, cli::check_rng(kSeed));
  const RadonQuadrature quad(3);
  auto gauss = [](const Vector& x) { return std::exp(-0.5 * x.squaredNorm()); };
  auto one = [](const Vector&) { return 1.0; };
  Rng rng = cli::check_rng(kSeed).substream(10);
  double section_err = 0.0;
  bool section_ok = true;
  const StarBody ellipsoid = StarBody::ellipsoid(Vector{{1.0, 2.0, 3.0}});
  for (int k = 0; k < 20; ++k) {
    const RadonCheckRow r = verify_section_radon(ellipsoid, gauss, sample_sphere(3, rng), quad, 1e-6);
    section_ok = section_ok && r.pass;
    section_err = std::max(section_err, r.rel_error);
  }
  for (const RadonCheckRow& r : {verify_section_radon(StarBody::ball(3), one, sample_sphere(3, rng), quad, 1e-6),
                                 verify_section_radon(StarBody::ellipsoid(Vector{{1.0, 1.0, 2.0}}), one,
                                                      UnitVector::basis(3, 2), quad, 1e-6)}) {
    section_ok = section_ok && r.pass;
    section_err = std::max(section_err, r.rel_error);
  }
  const RadonCheckRow b3 = ball_nu_mass_check(3), b4 = ball_nu_mass_check(4);
  const bool pass = cross.pass && cross.max_rel_error <= 1e-3 && section_ok && b3.pass && b4.pass;
  return {pass, "cross-polytope max rel err=" + num(cross.max_rel_error) + " (<= 1e-3); section max rel err=" +
                    num(section_err) + " (<= 1e-6); ball mass " + num(b3.lhs) + "<=" + num(b3.rhs) + ", " +
                    num(b4.lhs) + "<=" + num(b4.rhs)};
}

Outcome criterion11(Studies& st) {
  bool pass = true;
  std::size_t runs = 0;
  double worst = 1e300;
  for (const auto& m : constructed_measures(st)) {
    const GeneratorSet body = m.c.body.generators();
    for (double s : {1.0, 2.0, 5.0}) {
      const McEstimate mc = gaussian_polar_mc(body, s, 4000, cli::volume_rng(kSeed).substream(11));
      const KsProduct ks = ks_product(body, s);
      ++runs;
      pass = pass && mc.ci_hi() >= ks.value;
      worst = std::min(worst, mc.ci_hi() - ks.value);
    }
  }
  bool equal = true;
  for (int n : {4, 8}) {
    const GeneratorSet cross = GeneratorSet::cross_polytope(n, n);
    for (double s : {0.25, 0.5, 1.0, 5.0}) {
      const McEstimate mc = gaussian_polar_mc(cross, s, 20000, cli::volume_rng(kSeed).substream(12));
      equal = equal && std::abs(mc.estimate - ks_product(cross, s).value) <= 3.0 * mc.se;
    }
  }
  return {pass && equal, std::to_string(runs) + " body/s runs, min (mc + 3se - ks)=" + num(worst) +
                             "; cross-polytope equality within CI: " + (equal ? "yes" : "no")};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

Outcome criterion12() {
  const fs::path dir = fs::temp_directory_path() / "slicing_acceptance_determinism";
  fs::remove_all(dir);
  fs::create_directories(dir);
  const std::string bin = SLICING_LAB_BINARY;
  const std::string body = (dir / "body.json").string();
  auto sh = [](const std::string& cmd) { return std::system((cmd + " > /dev/null 2>&1").c_str()); };
  if (sh(bin + " --out-dir " + dir.string() + " construct --n 8 --seed 3") != 0)
    return {false, "construct failed"};
  std::vector<std::string> files;
  const std::vector<std::string> threads{"1", "1", "4"};
  for (std::size_t k = 0; k < threads.size(); ++k) {
    const fs::path out = dir / ("run" + std::to_string(k));
    const std::string base = bin + " --threads " + threads[k] + " --out-dir " + out.string();
    sh(base + " sections --body " + body + " --restarts 8 --seed 5");
    sh(base + " volume --body " + body + " --samples 4000 --seed 5");
    sh(base + " concentration bernstein --sampler cap-phi --p 0.3 --N 20 --trials 20000 --seed 5");
    files.push_back(slurp(out / "sections.csv") + slurp(out / "volume.csv") + slurp(out / "concentration.csv"));
  }
  const bool nonempty = files[0].size() > 100;
  const bool same = files[0] == files[1] && files[0] == files[2];
  fs::remove_all(dir);
  return {nonempty && same, "sections, volume and concentration CSVs at threads 1, 1, 4: " +
                                std::string(same ? "byte-identical" : "differ") + " (" +
                                std::to_string(files[0].size()) + " bytes)"};
}

}  // namespace

int main(int argc, char** argv) {
  std::set<int> only;
  for (int i = 1; i < argc; ++i) only.insert(std::atoi(argv[i]));
  Studies studies;
  const std::vector<std::pair<int, std::function<Outcome()>>> criteria{
      {1, [&] { return criterion1(studies); }},   {2, [&] { return criterion2(studies); }},
      {3, [&] { return criterion3(studies); }},   {4, [&] { return criterion4(studies); }},
      {5, criterion5},                             {6, criterion6},
      {7, criterion7},                             {8, criterion8},
      {9, [&] { return criterion9(studies); }},   {10, criterion10},
      {11, [&] { return criterion11(studies); }}, {12, criterion12},
  };
  int failures = 0;
  for (const auto& [id, fn] : criteria) {
    if (!only.empty() && !only.count(id)) continue;
    Outcome o;
    try {
      o = fn();
    } catch (const std::exception& e) {
      o = {false, std::string("error: ") + e.what()};
    }
    failures += !o.pass;
    std::cout << (o.pass ? "PASS" : "FAIL") << " criterion " << id << ": " << o.detail << std::endl;
  }
  return failures == 0 ? 0 : 1;
}
