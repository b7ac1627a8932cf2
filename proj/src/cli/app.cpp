#include "slicing/cli/app.hpp"

#include <CLI11.hpp>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <numbers>
#include <sstream>

#include "slicing/body_io.hpp"
#include "slicing/cli/experiments.hpp"
#include "slicing/cli/report.hpp"
#include "slicing/concentration.hpp"
#include "slicing/errors.hpp"
#include "slicing/parallel.hpp"
#include "slicing/radon.hpp"
#include "slicing/sections.hpp"
#include "slicing/tails.hpp"
#include "slicing/version.hpp"
#include "slicing/volume.hpp"

namespace slicing::cli {

namespace fs = std::filesystem;
using ojson = nlohmann::ordered_json;

namespace {

/// A check failed; the command still wrote its outputs.
struct CheckFailure {};

struct Globals {
  unsigned threads = 0;
  std::string config;
  std::string out_dir = ".";
  bool timings = false;
};

struct Timer {
  std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  }
};

std::string join_vector(const Vector& v, char sep = ';') {
  std::string s;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (i) s += sep;
    s += format_number(v[i]);
  }
  return s;
}

ojson vector_json(const Vector& v) {
  ojson a = ojson::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

double body_alpha(const CounterexampleBody& body) {
  if (const auto* p = std::get_if<PsiSchedule>(&body.schedule)) return p->alpha;
  return 0.0;
}

fs::path output_path(const Globals& g, const std::string& name) {
  fs::create_directories(g.out_dir);
  return fs::path(g.out_dir) / name;
}

void finish(RunReport& report, const Globals& g, const std::string& stem, const Timer& timer, std::ostream& out) {
  report.include_timings = g.timings;
  if (g.timings) report.timings["total_seconds"] = timer.seconds();
  report.write(output_path(g, stem + ".json"));
  for (const auto& c : report.checks)
    out << (c.pass ? "PASS " : "FAIL ") << c.name << "  lhs=" << format_number(c.lhs)
        << "  rhs=" << format_number(c.rhs) << (c.note.empty() ? "" : "  (" + c.note + ")") << '\n';
  if (!report.all_pass()) throw CheckFailure{};
}

// ---------------------------------------------------------------- construct

struct ConstructArgs {
  std::string kind = "two-stage";
  int n = 10;
  double alpha = 1.0;
  std::string schedule = "desk";
  std::uint64_t seed = 1;
  std::string out;
  double cap = kDefaultAtomCap;
  ScheduleOverrides overrides;
};

BodySpec spec_of(const ConstructArgs& a) {
  BodySpec spec;
  spec.kind = parse_body_kind(a.kind);
  spec.n = a.n;
  spec.alpha = a.alpha;
  spec.mode = parse_schedule_mode(a.schedule);
  spec.overrides = a.overrides;
  spec.cap = a.cap;
  return spec;
}

void cmd_construct(const ConstructArgs& a, const Globals& g, std::ostream& out) {
  const BodySpec spec = spec_of(a);
  if (spec.kind == BodyKind::PsiAlpha && spec.mode == ScheduleMode::Paper) {
    const PsiSchedule s = paper_schedule_psi(spec.n, spec.alpha, spec.cap);
    out << "paper psi schedule: N = " << format_number(s.N) << " (log N = " << format_number(s.log_N)
        << "), R = " << format_number(s.R) << '\n';
  }
  const Construction c = construct(spec, a.seed);
  const fs::path path = a.out.empty() ? output_path(g, "body.json") : fs::path(a.out);
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  save_body(c.body, path);
  out << "kind " << to_string(c.body.kind) << ", n = " << c.body.n << ", seed = " << a.seed << '\n';
  if (const auto* s = std::get_if<TwoStageSchedule>(&c.body.schedule)) {
    out << "N1 = " << s->N1 << ", N2 = " << s->N2 << ", R1 = " << format_number(s->R1)
        << ", R2 = " << format_number(s->R2) << '\n';
    if (s->regime_warning) out << "warning: outside the regime sqrt(n) < R1 < R2 <= n\n";
  } else {
    const auto& p = std::get<PsiSchedule>(c.body.schedule);
    out << "alpha = " << format_number(p.alpha) << ", N = " << format_number(p.N) << ", R = " << format_number(p.R) << '\n';
  }
  out << "generators: " << c.body.generator_count() << "\nwrote " << path.string() << '\n';
}

// ---------------------------------------------------------------- sections

struct SectionsArgs {
  std::string body;
  std::uint64_t seed = 1;
  MaximizeOptions maximize;
  std::size_t moment_directions = 1000;
};

void cmd_sections(const SectionsArgs& a, const Globals& g, std::ostream& out) {
  Timer timer;
  const CounterexampleBody body = load_body(a.body);
  const GaussianMixtureMeasure measure = measure_of(body);
  const MaximizerReport m = maximize_section(measure, a.maximize, maximizer_rng(a.seed));

  CsvTable csv({"n", "kind", "alpha", "seed", "xi_source", "t", "value", "stage", "budget"});
  for (const auto& r : m.trace)
    csv.add_row({std::to_string(body.n), to_string(body.kind), format_number(body_alpha(body)), std::to_string(a.seed),
                 r.source, format_number(r.t), format_number(r.value), r.stage, std::to_string(a.maximize.restarts)});
  csv.write(output_path(g, "sections.csv"));

  RunReport report;
  report.command = "sections";
  report.seed = a.seed;
  report.config = {{"body", a.body},
                   {"restarts", a.maximize.restarts},
                   {"net_delta", a.maximize.net_delta},
                   {"ascent_budget", a.maximize.ascent_budget},
                   {"bins", a.maximize.bins},
                   {"moment_directions", a.moment_directions}};
  report.fitted["M"] = m.value;
  report.fitted["M_is_lower_bound"] = true;
  report.fitted["best_t"] = m.best_t;
  report.fitted["best_xi"] = vector_json(m.best_xi.coords());
  report.fitted["best_source"] = m.best_source;
  report.fitted["net_stage_value"] = m.net_stage_value;
  report.fitted["ascent_iters"] = m.ascent_iters;
  report.fitted["budget_used"] = m.budget_used;
  report.fitted["candidates"] = m.candidates;
  report.fitted["net_radius"] = m.net_radius;
  report.add_check("ascent-not-below-net", m.value, m.net_stage_value, m.value >= m.net_stage_value);

  Rng draw = check_rng(a.seed);
  double min_moment = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < a.moment_directions; ++k)
    min_moment = std::min(min_moment, second_moment_direction(measure, sample_sphere(body.n, draw)));
  for (double factor : {1.0, 2.0}) {
    const double M = factor * m.value;
    const double rhs = 1.0 / (12.0 * M * M);
    report.add_check(factor == 1.0 ? "second-moment-bound-M" : "second-moment-bound-2M", min_moment, rhs,
                     min_moment >= rhs, "min over directions of the second moment vs 1/(12 M^2)");
  }
  out << "M = " << format_number(m.value) << " at t = " << format_number(m.best_t) << " (" << m.best_source
      << " seed; lower bound on the supremum)\n";
  finish(report, g, "sections", timer, out);
}

// ---------------------------------------------------------------- volume

struct VolumeArgs {
  std::string body;
  int cross = 0;
  std::vector<double> scales{1.0, 2.0, 5.0};
  std::size_t samples = 20000;
  std::size_t mc_volume = 0;
  std::uint64_t seed = 1;
};

void cmd_volume(const VolumeArgs& a, const Globals& g, std::ostream& out) {
  Timer timer;
  GeneratorSet gens;
  std::string kind;
  double trunc = 0.0;
  if (!a.body.empty()) {
    const CounterexampleBody body = load_body(a.body);
    gens = body.generators();
    kind = to_string(body.kind);
    trunc = truncation_scale(body.kind);
  } else if (a.cross > 0) {
    gens = GeneratorSet::cross_polytope(a.cross, a.cross);
    kind = "cross-polytope";
  } else {
    throw DomainError("volume needs --body or --cross");
  }
  const int n = gens.dim();
  RunReport report;
  report.command = "volume";
  report.seed = a.seed;
  report.config = {{"body", a.body}, {"cross", a.cross}, {"samples", a.samples}, {"mc_volume", a.mc_volume}};
  report.config["s"] = a.scales;
  CsvTable csv({"n", "kind", "s", "ks_product", "mc_estimate", "mc_ci_lo", "mc_ci_hi", "bracket_lo", "bracket_hi"});
  const Rng rng = volume_rng(a.seed);
  VolumeBracket last{};
  for (std::size_t k = 0; k < a.scales.size(); ++k) {
    const double s = a.scales[k];
    const Rng local = rng.substream(k);
    const VolumeBracket b = volume_bracket(gens, s, a.samples, local);
    const McEstimate mc = gaussian_polar_mc(gens, s, a.samples, local.substream(0));
    csv.add_row({std::to_string(n), kind, format_number(s), format_number(b.ks_product), format_number(mc.estimate),
                  format_number(mc.ci_lo()), format_number(mc.ci_hi()), format_number(b.lower), format_number(b.upper)});
    report.add_check("khatri-sidak s=" + format_number(s), mc.ci_hi(), b.ks_product, mc.ci_hi() >= b.ks_product,
                     "Monte-Carlo + 3 SE vs product bound");
    report.add_check("bracket-order s=" + format_number(s), b.lower, b.upper, b.lower <= b.upper);
    ojson f;
    f["upper"] = b.upper;
    f["santalo_upper"] = b.santalo_upper;
    f["radial_santalo_upper"] = b.radial_santalo_upper;
    if (trunc > 0.0) f["truncated_root"] = trunc * b.upper;
    report.fitted["s=" + format_number(s)] = f;
    last = b;
  }
  csv.write(output_path(g, "volume.csv"));
  if (a.mc_volume > 0 && !a.scales.empty()) {
    const McEstimate v = mc_volume_small_n(gens, a.mc_volume, rng.substream(1000));
    const double lo = std::pow(last.lower, n), hi = std::pow(last.upper, n);
    report.fitted["mc_volume"] = v.estimate;
    report.fitted["mc_volume_se"] = v.se;
    report.add_check("volume-above-bracket-lower", v.ci_hi(), lo, v.ci_hi() >= lo);
    report.add_check("volume-below-bracket-upper", v.ci_lo(), hi, v.ci_lo() <= hi);
  }
  finish(report, g, "volume", timer, out);
}

// ---------------------------------------------------------------- tails

struct TailsArgs {
  std::string body;
  double alpha = 0.0;
  double gamma = 0.05;
  std::size_t directions = 200;
  double t_max = 20.0;
  std::size_t t_points = 64;
  double beta_max = 20.0;
  std::size_t average_directions = 1000;
  std::size_t truncated_samples = 2000;
  std::uint64_t seed = 1;
};

void cmd_tails(const TailsArgs& a, const Globals& g, std::ostream& out) {
  Timer timer;
  const CounterexampleBody body = load_body(a.body);
  const GaussianMixtureMeasure measure = measure_of(body);
  const double alpha = a.alpha > 0.0 ? a.alpha : (body.kind == BodyKind::PsiAlpha ? body_alpha(body) : 2.0);
  const Rng rng = check_rng(a.seed);
  const TailEnvelope env = fit_envelope(measure, alpha, a.gamma, a.directions, a.t_max, a.t_points, rng.substream(0));
  CsvTable csv({"n", "alpha", "gamma", "direction_id", "E_xi", "second_moment", "ratio", "beta_local"});
  double min_ratio = std::numeric_limits<double>::infinity(), max_ratio = 0.0;
  for (std::size_t d = 0; d < env.per_direction.size(); ++d) {
    const auto& r = env.per_direction[d];
    csv.add_row({std::to_string(body.n), format_number(alpha), format_number(a.gamma), std::to_string(d),
                 format_number(r.E_xi), format_number(r.second_moment), format_number(r.ratio),
                 format_number(r.beta_local)});
    min_ratio = std::min(min_ratio, r.ratio);
    max_ratio = std::max(max_ratio, r.ratio);
  }
  csv.write(output_path(g, "tails.csv"));

  RunReport report;
  report.command = "tails";
  report.seed = a.seed;
  report.config = {{"body", a.body}, {"alpha", alpha}, {"gamma", a.gamma}, {"directions", a.directions},
                   {"t_max", a.t_max}, {"t_points", a.t_points}};
  report.fitted["beta"] = env.beta;
  report.fitted["argmax_t"] = env.argmax_t;
  report.fitted["argmax_direction"] = env.argmax_direction;
  report.fitted["reverse_holder_max"] = max_ratio;
  report.add_check("beta-bounded", env.beta, a.beta_max, env.beta <= a.beta_max);
  report.add_check("reverse-holder-at-least-one", min_ratio, 1.0, min_ratio >= 1.0);
  if (body.kind == BodyKind::PsiAlpha) {
    const DirectionAverages avg = direction_averages_check(body, a.average_directions, rng.substream(1));
    report.fitted["min_scaled_first_average"] = avg.min_scaled_first;
    report.fitted["max_exp_average"] = avg.max_exp_average;
    report.add_check("direction-first-average", avg.min_scaled_first, 0.5, avg.min_scaled_first >= 0.5);
    report.add_check("direction-exp-average", avg.max_exp_average, 10.0, avg.max_exp_average <= 10.0);
  }
  if (a.truncated_samples > 0) {
    const TruncatedDensity td = truncate_density(measure, body.generators(), truncation_scale(body.kind),
                                                 a.truncated_samples, rng.substream(2));
    const TruncatedMomentReport tm = truncated_moment_check(td, 16, a.truncated_samples, rng.substream(3));
    report.fitted["truncated_mass"] = td.mass_estimate;
    report.add_check("truncated-first-moment", tm.min_ratio, 0.9, tm.pass);
  }
  out << "beta = " << format_number(env.beta) << " (gamma = " << format_number(a.gamma) << ", alpha = "
      << format_number(alpha) << ")\n";
  finish(report, g, "tails", timer, out);
}

// ---------------------------------------------------------------- concentration

struct ConcentrationArgs {
  std::string mode = "all";
  std::string sampler = "bernoulli";
  double q = -1.0;
  double p = -1.0;
  std::uint64_t N = 50;
  std::uint64_t trials = 100000;
  int n = 8;
  double R = 4.0;
  double t = 0.0;
  double C = 3.0;
  double c = 0.3;
  bool grid = false;
  std::uint64_t seed = 1;
};

std::string params(std::initializer_list<std::pair<const char*, std::string>> kv) {
  std::string s;
  for (const auto& [k, v] : kv) {
    if (!s.empty()) s += ';';
    s += k;
    s += '=';
    s += v;
  }
  return s;
}

struct BernsteinCase {
  std::string sampler;
  double q;  // bernoulli parameter
  double p;
  std::uint64_t N;
};

void bernstein_rows(const ConcentrationArgs& a, CsvTable& csv, RunReport& report) {
  const Rng rng = check_rng(a.seed);
  std::vector<std::pair<UnitSampler, std::string>> runs;
  std::vector<std::pair<double, std::uint64_t>> pn;
  auto add = [&](const std::string& name, double p, std::uint64_t N, double q) {
    UnitSampler s = samplers::Uniform01{};
    std::string desc;
    if (name == "bernoulli") {
      s = samplers::Bernoulli{q};
      desc = params({{"sampler", name}, {"q", format_number(q)}});
    } else if (name == "cap-phi") {
      // On the grid, place the cap at the offset where its mean equals p.
      double t = a.t;
      if (a.grid && cap_expectation(a.n, a.R, 0.0) > p) {
        double lo = 0.0, hi = 4.0 * a.R + 40.0;
        for (int it = 0; it < 200; ++it) {
          const double mid = 0.5 * (lo + hi);
          (cap_expectation(a.n, a.R, mid) > p ? lo : hi) = mid;
        }
        t = hi;
      }
      s = samplers::CapPhi{a.n, a.R, t};
      desc = params({{"sampler", name}, {"n", std::to_string(a.n)}, {"R", format_number(a.R)}, {"t", format_number(t)}});
    } else if (name == "uniform") {
      desc = params({{"sampler", name}});
    } else {
      throw DomainError("unknown sampler: " + name);
    }
    runs.emplace_back(s, desc);
    pn.emplace_back(p, N);
  };
  if (a.grid) {
    for (double p : {0.05, 0.1, 0.3})
      for (std::uint64_t N : {20u, 50u, 100u}) {
        add("bernoulli", p, N, p);
        add("cap-phi", p, N, 0.0);
      }
  } else {
    const double q = a.q >= 0.0 ? a.q : a.p;
    add(a.sampler, a.p, a.N, q);
    if (a.p < 0.0) pn.back().first = sampler_mean(runs.back().first);
  }
  for (std::size_t k = 0; k < runs.size(); ++k) {
    const auto [p, N] = pn[k];
    if (!(p >= 0.0 && p <= 1.0)) throw DomainError("bernstein: p must lie in [0, 1]");
    const double mean = sampler_mean(runs[k].first);
    if (mean > p * (1.0 + 1e-9)) throw DomainError("bernstein: p must be at least the sampler mean");
    const DeviationReport r = bernstein_empirical(runs[k].first, p, N, a.trials, rng.substream(k));
    const double rhs = r.bound + 3.0 * r.standard_error();
    const std::string desc = runs[k].second + ";" +
                             params({{"p", format_number(p)}, {"N", std::to_string(N)}, {"trials", std::to_string(a.trials)}});
    csv.add_row({"bernstein", desc, format_number(r.rate()), format_number(rhs), r.pass() ? "true" : "false"});
    report.add_check("bernstein " + desc, r.rate(), rhs, r.pass());
  }
}

void cap_bound_rows(const ConcentrationArgs& a, CsvTable& csv, RunReport& report) {
  struct Point {
    int n;
    double R, t, lhs;
  };
  std::vector<Point> points;
  if (a.grid) {
    for (int n = 4; n <= 64; ++n) {
      const double root = std::sqrt(static_cast<double>(n));
      const double r_lo = std::ceil(root) + 1.0, r_hi = n;
      for (int i = 0; i < 8; ++i) {
        const double R = r_hi > r_lo ? r_lo * std::pow(r_hi / r_lo, i / 7.0) : r_lo;
        for (int j = 0; j < 8; ++j) points.push_back({n, R, 3.0 * R / root * j / 7.0, 0.0});
        if (r_hi <= r_lo) break;
      }
    }
  } else {
    points.push_back({a.n, a.R, a.t, 0.0});
  }
  parallel_for(points.size(), [&](std::size_t k) { points[k].lhs = cap_expectation(points[k].n, points[k].R, points[k].t); });
  auto rhs_of = [](const Point& p, double C, double c) {
    const double root = std::sqrt(static_cast<double>(p.n));
    return C * (root / p.R) * gaussian_phi(c * root * p.t / p.R);
  };
  std::size_t failures = 0;
  double worst = std::numeric_limits<double>::infinity();
  for (const auto& p : points) {
    const double rhs = rhs_of(p, a.C, a.c);
    const bool pass = p.lhs <= rhs;
    failures += !pass;
    worst = std::min(worst, rhs / p.lhs);
    csv.add_row({"cap-bound",
                 params({{"n", std::to_string(p.n)}, {"R", format_number(p.R)}, {"t", format_number(p.t)},
                         {"C", format_number(a.C)}, {"c", format_number(a.c)}}),
                 format_number(p.lhs), format_number(rhs), pass ? "true" : "false"});
  }
  // Largest c on a 0.01 grid for which every point passes with this C.
  double best_c = 0.0;
  for (int k = 1; k < 100; ++k) {
    const double c = k / 100.0;
    bool ok = true;
    for (const auto& p : points) ok = ok && p.lhs <= rhs_of(p, a.C, c);
    if (!ok) break;
    best_c = c;
  }
  report.fitted["cap_bound_largest_c"] = best_c;
  report.fitted["cap_bound_points"] = points.size();
  report.add_check("cap-bound C=" + format_number(a.C) + " c=" + format_number(a.c), static_cast<double>(failures), 0.0,
                   failures == 0, "failing grid points; min rhs/lhs " + format_number(worst));
}

void psi_moment_rows(CsvTable& csv, RunReport& report) {
  const double chain = 14.0 * std::exp(16.0) + std::sqrt(147.0 * std::numbers::pi);
  for (double alpha : {0.5, 1.0, 1.5, 2.0}) {
    double top = 0.0;
    for (int n = 3; n <= 128; ++n) {
      const double v = psi_moment(n, alpha);
      top = std::max(top, v);
      const bool pass = alpha != 0.5 || v <= chain;
      csv.add_row({"psi-moment", params({{"n", std::to_string(n)}, {"alpha", format_number(alpha)}}), format_number(v),
                   alpha == 0.5 ? format_number(chain) : "", pass ? "true" : "false"});
    }
    report.fitted["psi_moment_max alpha=" + format_number(alpha)] = top;
    if (alpha == 0.5) report.add_check("psi-moment alpha=0.5", top, chain, top <= chain);
  }
}

void cap_tail_rows(CsvTable& csv, RunReport& report) {
  double low = 1.0;
  for (int n = 3; n <= 128; ++n) {
    const double v = cap_tail(n, 1.0 / std::sqrt(static_cast<double>(n)));
    low = std::min(low, v);
    csv.add_row({"cap-tail", params({{"n", std::to_string(n)}, {"u", "1/sqrt(n)"}}), format_number(v), "0.25",
                 v >= 0.25 ? "true" : "false"});
  }
  report.fitted["cap_tail_min"] = low;
  report.add_check("cap-tail u=1/sqrt(n)", low, 0.25, low >= 0.25);
}

void cmd_concentration(const ConcentrationArgs& a, const Globals& g, std::ostream& out) {
  Timer timer;
  CsvTable csv({"lemma", "params", "lhs", "rhs", "pass"});
  RunReport report;
  report.command = "concentration";
  report.seed = a.seed;
  report.config = {{"mode", a.mode}, {"sampler", a.sampler}, {"p", a.p}, {"N", a.N}, {"trials", a.trials},
                   {"n", a.n}, {"R", a.R}, {"t", a.t}, {"C", a.C}, {"c", a.c}, {"grid", a.grid}};
  const bool all = a.mode == "all";
  if (!all && a.mode != "bernstein" && a.mode != "cap-bound" && a.mode != "psi-moment" && a.mode != "cap-tail")
    throw DomainError("unknown concentration mode: " + a.mode);
  if (all || a.mode == "bernstein") {
    if (all || a.p >= 0.0 || a.sampler == "cap-phi" || a.grid) {
      ConcentrationArgs b = a;
      if (all) b.grid = true;
      bernstein_rows(b, csv, report);
    } else {
      throw DomainError("bernstein needs --p (or --grid)");
    }
  }
  if (all || a.mode == "cap-bound") {
    ConcentrationArgs b = a;
    if (all) b.grid = true;
    cap_bound_rows(b, csv, report);
  }
  if (all || a.mode == "psi-moment") psi_moment_rows(csv, report);
  if (all || a.mode == "cap-tail") cap_tail_rows(csv, report);
  csv.write(output_path(g, "concentration.csv"));
  finish(report, g, "concentration", timer, out);
}

// ---------------------------------------------------------------- radon

struct RadonArgs {
  std::string mode = "all";
  std::size_t dirs = 50;
  double tol = 1e-3;
  double section_tol = 1e-6;
  std::uint64_t seed = 1;
};

void radon_row(CsvTable& csv, const RadonCheckRow& r) {
  csv.add_row({r.check, std::to_string(r.n), join_vector(r.direction), format_number(r.lhs), format_number(r.rhs),
               format_number(r.rel_error), r.pass ? "true" : "false"});
}

void cmd_radon(const RadonArgs& a, const Globals& g, std::ostream& out) {
  Timer timer;
  const bool all = a.mode == "all";
  if (!all && a.mode != "crosspolytope" && a.mode != "section" && a.mode != "ball-mass")
    throw DomainError("unknown radon mode: " + a.mode);
  CsvTable csv({"check", "n", "direction", "lhs", "rhs", "rel_error", "pass"});
  RunReport report;
  report.command = "radon";
  report.seed = a.seed;
  report.config = {{"mode", a.mode}, {"dirs", a.dirs}, {"tol", a.tol}, {"section_tol", a.section_tol}};
  const Rng rng = check_rng(a.seed);
  if (all || a.mode == "crosspolytope") {
    const RadonReport r = verify_crosspolytope(3, a.dirs, a.tol, rng.substream(0));
    for (const auto& row : r.rows) radon_row(csv, row);
    report.add_check("crosspolytope max rel error", r.max_rel_error, a.tol, r.max_rel_error <= a.tol);
  }
  if (all || a.mode == "section") {
    const RadonQuadrature quad(3);
    const Density one = [](const Vector&) { return 1.0; };
    const Density gauss = [](const Vector& x) { return std::exp(-0.5 * x.squaredNorm()); };
    std::vector<RadonCheckRow> rows;
    rows.push_back(verify_section_radon(StarBody::ball(3), one, UnitVector::basis(3, 2), quad, a.section_tol));
    Vector axes(3);
    axes << 1.0, 1.0, 2.0;
    rows.push_back(verify_section_radon(StarBody::ellipsoid(axes), one, UnitVector::basis(3, 2), quad, a.section_tol));
    axes << 1.0, 2.0, 3.0;
    const StarBody ell = StarBody::ellipsoid(axes);
    Rng draw = rng.substream(1);
    std::vector<UnitVector> dirs;
    for (int k = 0; k < 20; ++k) dirs.push_back(sample_sphere(3, draw));
    std::vector<RadonCheckRow> random_rows(dirs.size());
    parallel_for(dirs.size(), [&](std::size_t k) { random_rows[k] = verify_section_radon(ell, gauss, dirs[k], quad, a.section_tol); });
    rows.insert(rows.end(), random_rows.begin(), random_rows.end());
    double worst = 0.0;
    for (const auto& r : rows) {
      radon_row(csv, r);
      worst = std::max(worst, r.rel_error);
    }
    report.add_check("section-radon max rel error", worst, a.section_tol, worst <= a.section_tol);
  }
  if (all || a.mode == "ball-mass") {
    for (int n : {3, 4}) {
      const RadonCheckRow r = ball_nu_mass_check(n);
      radon_row(csv, r);
      report.add_check("ball-nu-mass n=" + std::to_string(n), r.lhs, r.rhs, r.pass);
    }
  }
  csv.write(output_path(g, "radon.csv"));
  finish(report, g, "radon", timer, out);
}

// ---------------------------------------------------------------- scaling

struct ScalingArgs {
  std::string kind = "two-stage";
  std::vector<int> ns{6, 10, 16, 24};
  double alpha = 1.0;
  std::string schedule;
  std::uint64_t seed = 1;
  MaximizeOptions maximize;
  double s = 5.0;
  std::size_t volume_samples = 20000;
  bool no_volume = false;
  double slope_tol = 0.25;
  double spread_max = 2.5;
  double truncated_root_max = 40.0;
};

void cmd_scaling(const ScalingArgs& a, const Globals& g, std::ostream& out) {
  Timer timer;
  if (a.ns.size() < 3) throw DomainError("scaling needs at least three values of n to fit a slope");
  ScalingOptions o;
  o.body.kind = parse_body_kind(a.kind);
  o.body.alpha = a.alpha;
  const std::string mode = a.schedule.empty() ? (o.body.kind == BodyKind::TwoStage ? "paper" : "desk") : a.schedule;
  o.body.mode = parse_schedule_mode(mode);
  o.ns = a.ns;
  o.maximize = a.maximize;
  o.seed = a.seed;
  o.volume = !a.no_volume;
  o.volume_scale = a.s;
  o.volume_samples = a.volume_samples;
  const ScalingStudy st = run_scaling(o);
  scaling_table(st).write(output_path(g, "scaling.csv"));

  RunReport report;
  report.command = "scaling";
  report.seed = a.seed;
  report.config = {{"kind", a.kind}, {"alpha", a.alpha}, {"schedule", mode}, {"restarts", a.maximize.restarts},
                   {"s", a.s}, {"volume_samples", a.volume_samples}};
  report.config["ns"] = a.ns;
  report.fitted["slope"] = st.slope;
  report.fitted["normalized_spread"] = st.normalized_spread;
  const double target = target_slope(st.kind, a.alpha);
  if (st.kind == BodyKind::TwoStage) {
    report.add_check("slope-upper", st.slope, -0.25, st.slope <= -0.25);
    report.add_check("slope-lower", st.slope, -0.75, st.slope >= -0.75);
    report.add_check("normalized-spread", st.normalized_spread, a.spread_max, st.normalized_spread <= a.spread_max);
  } else {
    report.add_check("slope-near-target", std::abs(st.slope - target), a.slope_tol, std::abs(st.slope - target) <= a.slope_tol,
                     "target " + format_number(target) + "; paper atom count replaced by N = 200 n");
  }
  if (o.volume && st.kind == BodyKind::TwoStage)
    for (const auto& p : st.points)
      report.add_check("truncated-volume-root n=" + std::to_string(p.n), p.truncated_root, a.truncated_root_max,
                       p.truncated_root <= a.truncated_root_max);
  for (const auto& p : st.points)
    out << "n = " << p.n << ": M = " << format_number(p.M) << ", normalized = " << format_number(p.normalized)
        << (o.volume ? ", |T|^(1/n) <= " + format_number(p.truncated_root) : std::string()) << '\n';
  out << "slope = " << format_number(st.slope) << " (target " << format_number(target) << ")\n";
  finish(report, g, "scaling", timer, out);
}

// ---------------------------------------------------------------- report

void cmd_report(const std::string& in_dir, const Globals& g, std::ostream& out) {
  const fs::path dir = in_dir.empty() ? fs::path(g.out_dir) : fs::path(in_dir);
  if (!fs::is_directory(dir)) throw Error("no such directory: " + dir.string());
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(dir))
    if (e.path().extension() == ".json" && e.path().filename() != "summary.json") files.push_back(e.path());
  std::sort(files.begin(), files.end());
  ojson summary;
  summary["version"] = kVersion;
  summary["runs"] = ojson::array();
  bool pass = true;
  for (const auto& f : files) {
    std::ifstream in(f);
    ojson doc;
    try {
      doc = ojson::parse(in);
    } catch (const ojson::exception&) {
      continue;
    }
    if (!doc.is_object() || !doc.contains("checks")) continue;
    const bool ok = doc.value("pass", false);
    pass = pass && ok;
    summary["runs"].push_back({{"file", f.filename().string()}, {"command", doc.value("command", "")}, {"pass", ok}});
    out << (ok ? "PASS " : "FAIL ") << f.filename().string() << '\n';
  }
  summary["pass"] = pass;
  std::ofstream(dir / "summary.json") << summary.dump(2) << '\n';
  if (!pass) throw CheckFailure{};
}

// ---------------------------------------------------------------- config

// Appends JSON config entries as flags unless the flag is already given.
std::vector<std::string> apply_config(std::vector<std::string> args) {
  std::string path;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) path = args[i + 1];
    if (args[i].rfind("--config=", 0) == 0) path = args[i].substr(9);
  }
  if (path.empty()) return args;
  std::ifstream in(path);
  if (!in) throw Error("cannot read config " + path);
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw Error(std::string("config: ") + e.what());
  }
  if (!doc.is_object()) throw Error("config must be a JSON object");
  auto given = [&](const std::string& flag) {
    for (const auto& a : args)
      if (a == flag || a.rfind(flag + "=", 0) == 0) return true;
    return false;
  };
  auto scalar = [](const nlohmann::json& v) {
    if (v.is_string()) return v.get<std::string>();
    if (v.is_number_integer()) return std::to_string(v.get<long long>());
    if (v.is_number_unsigned()) return std::to_string(v.get<unsigned long long>());
    if (v.is_number()) return format_number(v.get<double>());
    throw Error("config values must be strings, numbers, booleans or arrays");
  };
  for (const auto& [key, value] : doc.items()) {
    const std::string flag = "--" + key;
    if (given(flag)) continue;
    if (value.is_boolean()) {
      if (value.get<bool>()) args.push_back(flag);
    } else if (value.is_array()) {
      std::string joined;
      for (const auto& v : value) joined += (joined.empty() ? "" : ",") + scalar(v);
      args.push_back(flag);
      args.push_back(joined);
    } else {
      args.push_back(flag);
      args.push_back(scalar(value));
    }
  }
  return args;
}

void add_maximize_options(CLI::App* cmd, MaximizeOptions& m) {
  cmd->add_option("--restarts", m.restarts, "Ascent restarts from the best candidates");
  cmd->add_option("--net-delta", m.net_delta, "Sphere net spacing");
  cmd->add_option("--net-points", m.net_points, "Cap on net points");
  cmd->add_option("--atom-seeds", m.atom_seeds, "Atom directions added per stage");
  cmd->add_option("--t-step", m.t_step, "Offset grid step (0: automatic)");
  cmd->add_option("--t-bound", m.t_bound, "Offset grid bound (0: automatic)");
  cmd->add_option("--ascent-budget", m.ascent_budget, "Ascent iterations per restart");
  cmd->add_option("--bins", m.bins, "Histogram bins for binned scoring");
}

}  // namespace

int run(const std::vector<std::string>& raw_args, std::ostream& out, std::ostream& err) {
  Globals g;
  CLI::App app{"Numerical experiments on hyperplane sections of convex bodies with Gaussian-mixture densities",
               "slicing_lab"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);
  app.fallthrough();
  app.add_option("--threads", g.threads, "Worker threads (default: SLICING_LAB_THREADS or all cores)");
  app.add_option("--config", g.config, "JSON file of flag values; explicit flags win");
  app.add_option("--out-dir", g.out_dir, "Directory for CSV and JSON outputs");
  app.add_flag("--timings", g.timings, "Record wall-clock timings in reports");

  ConstructArgs ca;
  auto* construct_cmd = app.add_subcommand("construct", "Build a counterexample body and write it as JSON");
  construct_cmd->add_option("--kind", ca.kind, "two-stage | psi");
  construct_cmd->add_option("--n", ca.n, "Dimension")->required();
  construct_cmd->add_option("--alpha", ca.alpha, "Tail exponent (psi)");
  construct_cmd->add_option("--schedule", ca.schedule, "paper | desk");
  construct_cmd->add_option("--seed", ca.seed);
  construct_cmd->add_option("--out", ca.out, "Body file (default <out-dir>/body.json)");
  construct_cmd->add_option("--cap", ca.cap, "Largest materialized atom count");
  construct_cmd->add_option("--N1", ca.overrides.N1);
  construct_cmd->add_option("--N2", ca.overrides.N2);
  construct_cmd->add_option("--R1", ca.overrides.R1);
  construct_cmd->add_option("--R2", ca.overrides.R2);
  construct_cmd->add_option("--N", ca.overrides.N);
  construct_cmd->add_option("--R", ca.overrides.R);

  SectionsArgs sa;
  auto* sections_cmd = app.add_subcommand("sections", "Maximize hyperplane sections of a body's measure");
  sections_cmd->add_option("--body", sa.body)->required();
  sections_cmd->add_option("--seed", sa.seed);
  sections_cmd->add_option("--moment-directions", sa.moment_directions);
  add_maximize_options(sections_cmd, sa.maximize);

  VolumeArgs va;
  auto* volume_cmd = app.add_subcommand("volume", "Khatri-Sidak products and volume brackets");
  volume_cmd->add_option("--body", va.body);
  volume_cmd->add_option("--cross", va.cross, "Use conv(+-n e_k) in this dimension");
  volume_cmd->add_option("--s", va.scales, "Polar dilations")->delimiter(',');
  volume_cmd->add_option("--samples", va.samples);
  volume_cmd->add_option("--mc-volume", va.mc_volume, "Rejection samples for the direct volume (n <= 6)");
  volume_cmd->add_option("--seed", va.seed);

  TailsArgs ta;
  auto* tails_cmd = app.add_subcommand("tails", "Tail envelopes and moment ratios");
  tails_cmd->add_option("--body", ta.body)->required();
  tails_cmd->add_option("--alpha", ta.alpha);
  tails_cmd->add_option("--gamma", ta.gamma);
  tails_cmd->add_option("--directions", ta.directions);
  tails_cmd->add_option("--t-max", ta.t_max);
  tails_cmd->add_option("--t-points", ta.t_points);
  tails_cmd->add_option("--beta-max", ta.beta_max);
  tails_cmd->add_option("--average-directions", ta.average_directions);
  tails_cmd->add_option("--truncated-samples", ta.truncated_samples, "0 disables the truncated-moment check");
  tails_cmd->add_option("--seed", ta.seed);

  ConcentrationArgs ka;
  auto* conc_cmd = app.add_subcommand("concentration", "Deviation and cap-distribution checks");
  conc_cmd->add_option("mode", ka.mode, "bernstein | cap-bound | psi-moment | cap-tail | all");
  conc_cmd->add_option("--sampler", ka.sampler, "bernoulli | uniform | cap-phi");
  conc_cmd->add_option("--q", ka.q);
  conc_cmd->add_option("--p", ka.p);
  conc_cmd->add_option("--N", ka.N);
  conc_cmd->add_option("--trials", ka.trials);
  conc_cmd->add_option("--n", ka.n);
  conc_cmd->add_option("--R", ka.R);
  conc_cmd->add_option("--t", ka.t);
  conc_cmd->add_option("--C", ka.C);
  conc_cmd->add_option("--c", ka.c);
  conc_cmd->add_flag("--grid", ka.grid, "Run the full parameter grid");
  conc_cmd->add_option("--seed", ka.seed);

  RadonArgs ra;
  auto* radon_cmd = app.add_subcommand("radon", "Spherical Radon transform identities");
  radon_cmd->add_option("mode", ra.mode, "crosspolytope | section | ball-mass | all");
  radon_cmd->add_option("--dirs", ra.dirs);
  radon_cmd->add_option("--tol", ra.tol);
  radon_cmd->add_option("--section-tol", ra.section_tol);
  radon_cmd->add_option("--seed", ra.seed);

  ScalingArgs sc;
  auto* scaling_cmd = app.add_subcommand("scaling", "Maximal section against dimension");
  scaling_cmd->add_option("--kind", sc.kind);
  scaling_cmd->add_option("--ns", sc.ns, "Dimensions, comma separated")->delimiter(',');
  scaling_cmd->add_option("--alpha", sc.alpha);
  scaling_cmd->add_option("--schedule", sc.schedule, "paper | desk (default paper for two-stage, desk for psi)");
  scaling_cmd->add_option("--seed", sc.seed);
  scaling_cmd->add_option("--s", sc.s, "Polar dilation for the volume bracket");
  scaling_cmd->add_option("--volume-samples", sc.volume_samples);
  scaling_cmd->add_flag("--no-volume", sc.no_volume);
  add_maximize_options(scaling_cmd, sc.maximize);

  std::string report_dir;
  auto* report_cmd = app.add_subcommand("report", "Summarize the JSON reports in a directory");
  report_cmd->add_option("--in-dir", report_dir, "Directory to scan (default <out-dir>)");

  try {
    std::vector<std::string> args = apply_config(raw_args);
    std::reverse(args.begin(), args.end());
    app.parse(args);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kPass;
  } catch (const CLI::CallForVersion&) {
    out << kVersion << '\n';
    return kPass;
  } catch (const CLI::ParseError& e) {
    err << e.what() << '\n';
    return kUsageError;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kUsageError;
  }

  if (g.threads > 0) set_thread_count(g.threads);
  try {
    if (construct_cmd->parsed()) cmd_construct(ca, g, out);
    if (sections_cmd->parsed()) cmd_sections(sa, g, out);
    if (volume_cmd->parsed()) cmd_volume(va, g, out);
    if (tails_cmd->parsed()) cmd_tails(ta, g, out);
    if (conc_cmd->parsed()) cmd_concentration(ka, g, out);
    if (radon_cmd->parsed()) cmd_radon(ra, g, out);
    if (scaling_cmd->parsed()) cmd_scaling(sc, g, out);
    if (report_cmd->parsed()) cmd_report(report_dir, g, out);
  } catch (const CheckFailure&) {
    return kCheckFailure;
  } catch (const InfeasibleSchedule& e) {
    err << "infeasible schedule: " << e.what() << '\n';
    return kInfeasible;
  } catch (const NumericalError& e) {
    err << "numerical failure: " << e.what() << '\n';
    return kCheckFailure;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kUsageError;
  }
  return kPass;
}

}  // namespace slicing::cli
