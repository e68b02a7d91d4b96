// Acceptance runs. Usage: acceptance <criterion 1..11>
// Prints one PASS/FAIL line for the criterion; detail lines are indented.

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
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include "homog/homog.hpp"
#include "homog/runner.hpp"
#include "homog/subadd.hpp"

using namespace homog;

namespace {

struct Verdict {
  bool pass = false;
  std::string summary;
};

class Clock {
 public:
  double seconds() const { return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count(); }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

std::string fmt(double v, int digits = 4) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.*g", digits, v);
  return buf;
}

void detail(const std::string& s) { std::cout << "  " << s << "\n" << std::flush; }

EnvironmentSpec random_kpp() {
  EnvironmentSpec s;
  s.ellipticity = 0.8;
  s.diffusion_max = 1.2;
  s.drift_max = 0.4;
  s.growth_min = 0.6;
  s.growth_max = 1.4;
  return s;
}

EnvironmentSpec random_geq() {
  EnvironmentSpec s;
  s.mode = EnvMode::Geq;
  s.flame_min = 0.8;
  s.flame_max = 1.2;
  s.stream_amplitude = 0.03;
  s.mean_flow = {0.2, 0.1};
  return s;
}

// Spec drawn from ranges that keep every hypothesis satisfied.
EnvironmentSpec drawn_spec(std::mt19937_64& rng, bool geq) {
  std::uniform_real_distribution<double> U(0.0, 1.0);
  EnvironmentSpec s;
  if (geq) {
    s.mode = EnvMode::Geq;
    s.flame_min = 0.6 + 0.4 * U(rng);
    s.flame_max = s.flame_min + 0.5 * U(rng);
    s.stream_amplitude = 0.05 * U(rng);
    const double a = 2 * M_PI * U(rng);
    s.mean_flow = 0.3 * U(rng) * unit_direction(a);
  } else {
    s.ellipticity = 0.6 + 0.4 * U(rng);
    s.diffusion_max = s.ellipticity + 0.5 * U(rng);
    s.drift_max = 0.5 * U(rng);
    s.growth_min = 0.5 + 0.5 * U(rng);
    s.growth_max = s.growth_min + 0.6 * U(rng);
  }
  return s;
}

std::string spec_text(const EnvironmentSpec& s) {
  std::ostringstream os;
  if (s.mode == EnvMode::Geq)
    os << "geq c=[" << fmt(s.flame_min) << "," << fmt(s.flame_max) << "] stream=" << fmt(s.stream_amplitude)
       << " v=(" << fmt(s.mean_flow.x) << "," << fmt(s.mean_flow.y) << ")";
  else
    os << "kpp a=[" << fmt(s.ellipticity) << "," << fmt(s.diffusion_max) << "] b=" << fmt(s.drift_max) << " g=["
       << fmt(s.growth_min) << "," << fmt(s.growth_max) << "]";
  return os.str();
}

Verdict speed_constant_kpp() {
  Clock clock;
  SpeedTableOptions opt;
  opt.directions = 32;
  opt.radius = 40.0;
  opt.samples = 2;
  opt.front.h = 0.2;
  const DirectionalSpeedTable t = estimate_speed_table(EnvironmentSpec{}, opt);
  const auto [lo, hi] = std::minmax_element(t.w.begin(), t.w.end());
  const double secs = clock.seconds();
  detail("h=0.2 R=40 K=32: w in [" + fmt(*lo, 6) + ", " + fmt(*hi, 6) + "], " + fmt(secs, 3) + " s");
  const bool ok = t.size() == 32 && *lo >= 1.8 && *hi <= 2.2 && secs < 600.0;
  return {ok, "constant KPP speed: all 32 w(e) in [1.8, 2.2] (min " + fmt(*lo) + ", max " + fmt(*hi) +
                  "), runtime " + fmt(secs, 3) + " s < 600 s"};
}

Verdict speed_constant_flow() {
  Clock clock;
  EnvironmentSpec s;
  s.mode = EnvMode::Geq;
  s.mean_flow = {0.5, 0.0};
  SpeedTableOptions opt;
  opt.directions = 4;
  opt.radius = 40.0;
  opt.samples = 2;
  opt.front.h = 0.25;
  opt.front.margin = 3.0;
  const DirectionalSpeedTable t = estimate_speed_table(s, opt);
  const double expect[] = {1.5, std::sqrt(0.75), 0.5, std::sqrt(0.75)};
  double worst = 0.0;
  for (int k = 0; k < 4; ++k) {
    const double rel = std::abs(t.w[k] - expect[k]) / expect[k];
    worst = std::max(worst, rel);
    detail("e=(" + fmt(t.directions[k].x, 2) + "," + fmt(t.directions[k].y, 2) + ") w=" + fmt(t.w[k], 6) +
           " expected " + fmt(expect[k], 6));
  }
  const double secs = clock.seconds();
  return {worst <= 0.05 && secs < 120.0,
          "constant-flow G-equation speeds within 5% (worst " + fmt(100 * worst, 3) + "%), runtime " + fmt(secs, 3) +
              " s < 120 s"};
}

struct Tally {
  int instances = 0;
  int violations = 0;
  double worst = std::numeric_limits<double>::infinity();
  void add(double margin, const std::string& what) {
    ++instances;
    worst = std::min(worst, margin);
    if (margin < 0.0) {
      ++violations;
      detail("violation " + what + " margin=" + fmt(margin));
    }
  }
};

std::string structural_family(const EnvironmentSpec& spec, const FrontOptions& base, Seed master,
                              std::map<std::string, Tally>& tallies) {
  FrontOptions o = base;
  o.sample_every = 0.25;
  const MCalibration cal = calibrate_m(spec, o, 5, 12.0, derive_seed(master, {0}));
  const double m = cal.m_emp;
  std::mt19937_64 rng(derive_seed(master, {1}));
  std::uniform_real_distribution<double> U(0.0, 1.0);
  auto point_in = [&](double r) { return r * std::sqrt(U(rng)) * unit_direction(2 * M_PI * U(rng)); };
  for (int k = 0; k < 20; ++k) {
    const Seed seed = derive_seed(master, {2, k});
    const Environment env = build_environment(spec, seed);
    const double t0 = 4.0 * U(rng);
    const Point x = point_in(8.0);
    const Point z = point_in(6.0);
    const std::string tag = "seed=" + std::to_string(seed);

    const InequalityReport sub = check_subadditivity(env, t0, {}, z, x, o, m);
    tallies["subadditivity"].add(sub.margin(), tag + " " + sub.reproduce);

    const TravelTimeRecord rec = front_time(env, t0, {}, x, o);
    tallies["linear_bound"].add(check_linear_bound(rec, m, 0.0).margin(), tag);

    const InequalityReport lip = check_lipschitz_in_target(env, t0, {}, x, z, o, m);
    tallies["target_lipschitz"].add(lip.margin(), tag + " " + lip.reproduce);

    const Point near = point_in(2.0);
    const double wait = m * (norm(near) + 1.0);
    const InequalityReport rst = check_restart_monotonicity(env, t0, {}, near, x, wait, o, m);
    tallies["restart_monotonicity"].add(rst.margin(), tag + " " + rst.reproduce);

    FrontOptions fo = o;
    fo.horizon = 12.0;
    const TravelRun run = spec.mode == EnvMode::Kpp ? travel_times_kpp(env, t0, {}, {}, fo)
                                                    : arrival_times_geq(env, t0, {}, {}, fo);
    const SandwichCount sc = check_ball_sandwich(run.front, m, run.grid.h);
    Tally& bs = tallies["ball_sandwich"];
    bs.instances += sc.samples;
    bs.violations += sc.violations;
    bs.worst = std::min(bs.worst, sc.worst_margin);
    if (sc.violations) detail("violation ball_sandwich " + tag);
  }
  return "M=" + fmt(m);
}

Verdict structural_inequalities() {
  std::map<std::string, Tally> kpp, geq;
  FrontOptions ko;
  ko.h = 0.25;
  FrontOptions go;
  go.h = 0.1;
  go.margin = 3.0;
  const std::string mk = structural_family(random_kpp(), ko, 301, kpp);
  const std::string mg = structural_family(random_geq(), go, 302, geq);
  int violations = 0;
  for (auto* fam : {&kpp, &geq})
    for (const auto& [name, t] : *fam) {
      detail((fam == &kpp ? "kpp " : "geq ") + name + ": " + std::to_string(t.instances) + " instances, " +
             std::to_string(t.violations) + " violations, worst margin " + fmt(t.worst));
      violations += t.violations;
    }
  return {violations == 0, "structural inequalities on 20 KPP + 20 GEQ seeds (" + mk + ", " + mg +
                               "): " + std::to_string(violations) + " violations"};
}

Verdict subadditive_testbed() {
  const TimedProcess p = additive_uniform_process(1.0, 2.0);
  const std::vector<int> grid{8, 32, 128};
  const ConvergenceEstimate est = estimate_limit(p, grid, 200, 404);
  const double se = est.sd.back() / std::sqrt(double(est.count.back()));
  const double err = std::abs(est.limit - 1.5);
  const double ratio = est.sd.back() / est.sd.front();
  const bool hyp = validate_process(p, 200, 405).ok();
  detail("limit=" + fmt(est.limit, 6) + " se=" + fmt(se) + " sd8=" + fmt(est.sd.front()) + " sd128=" +
         fmt(est.sd.back()));
  return {err <= 3 * se && ratio <= 0.5 && hyp,
          "additive uniform[1,2] process: |limit-1.5|=" + fmt(err) + " <= 3SE=" + fmt(3 * se) + ", SD ratio " +
              fmt(ratio) + " <= 0.5"};
}

Verdict comparison_principle() {
  std::mt19937_64 rng(505);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  double worst = std::numeric_limits<double>::infinity();
  auto order = [&](const std::vector<double>& lo, const std::vector<double>& hi) {
    for (std::size_t k = 0; k < lo.size(); ++k) worst = std::min(worst, hi[k] - lo[k]);
  };
  {
    const EnvironmentSpec s = random_kpp();
    const Grid g = make_kpp_grid(s, 0.25, 4.0);
    for (int pair = 0; pair < 50; ++pair) {
      const Environment env = build_environment(s, 1000 + pair);
      SolutionField lo{g, env, 0.0, 0.0, std::vector<double>(g.size())};
      SolutionField hi = lo;
      for (std::size_t k = 0; k < g.size(); ++k) {
        const double a = U(rng), b = U(rng);
        lo.u[k] = std::min(a, b);
        hi.u[k] = std::max(a, b);
      }
      KppSolver solver(env, {}, g);
      solver.set_boundary_guard(std::nullopt);
      for (int n = 0; n < 40; ++n) {
        solver.step(lo);
        solver.step(hi);
        order(lo.u, hi.u);
      }
    }
  }
  const double kpp_worst = worst;
  {
    const EnvironmentSpec s = random_geq();
    const Grid g = make_geq_grid(s, 0.2, 3.0);
    std::uniform_real_distribution<double> V(-1.0, 1.0);
    for (int pair = 0; pair < 50; ++pair) {
      const Environment env = build_environment(s, 2000 + pair);
      LevelFunction lo{g, env, 0.0, 0.0, std::vector<double>(g.size())};
      LevelFunction hi = lo;
      for (std::size_t k = 0; k < g.size(); ++k) {
        const double a = V(rng), b = V(rng);
        lo.phi[k] = std::min(a, b);
        hi.phi[k] = std::max(a, b);
      }
      HjSolver solver(env, g);
      for (int n = 0; n < 40; ++n) {
        solver.step(lo);
        solver.step(hi);
        order(lo.phi, hi.phi);
      }
    }
  }
  detail("kpp worst hi-lo=" + fmt(kpp_worst) + ", overall " + fmt(worst));
  return {worst >= -1e-10, "comparison principle: 50 ordered pairs per solver, 40 steps, worst gap " + fmt(worst) +
                               " >= -1e-10"};
}

Verdict wulff_convexity() {
  std::mt19937_64 rng(606);
  int bad = 0;
  for (int k = 0; k < 10; ++k) {
    const EnvironmentSpec s = drawn_spec(rng, k % 2 == 1);
    if (!validate_hypotheses(s, {}).ok()) {
      ++bad;
      detail("spec " + std::to_string(k) + " fails its hypotheses: " + spec_text(s));
      continue;
    }
    SpeedTableOptions opt;
    opt.directions = 32;
    opt.radius = 24.0;
    opt.samples = 2;
    opt.master = derive_seed(606, {k});
    opt.front.h = 0.25;
    if (s.mode == EnvMode::Geq) opt.front.margin = 3.0;
    const DirectionalSpeedTable t = estimate_speed_table(s, opt);
    const ConvexityReport r = check_convexity(assemble_shape(t), t, t.h);
    detail(spec_text(s) + ": worst margin " + fmt(r.worst_margin) + ", slack " + fmt(r.slack) + ", " +
           std::to_string(r.violations.size()) + " violations, " + std::to_string(r.vertices_off_hull) +
           " vertices off hull");
    if (!r.ok()) ++bad;
  }
  return {bad == 0, "Wulff convexity with CI slack on 10 random specs, K=32: " + std::to_string(bad) + " failures"};
}

Verdict reaction_independence() {
  std::mt19937_64 rng(707);
  int bad = 0;
  double worst = 0.0;
  for (int k = 0; k < 5; ++k) {
    const EnvironmentSpec s = drawn_spec(rng, false);
    SpeedTableOptions opt;
    opt.directions = 16;
    opt.radius = 24.0;
    opt.samples = 4;
    opt.master = derive_seed(707, {k});
    opt.front.h = 0.25;
    const DirectionalSpeedTable a = estimate_speed_table(s, opt);
    opt.front.reaction.form = ReactionForm::PiecewiseLinear;
    const DirectionalSpeedTable b = estimate_speed_table(s, opt);
    double spec_worst = 0.0;
    for (std::size_t d = 0; d < a.size(); ++d) {
      const double allowed = 2.0 * std::max(a.w_ci[d], b.w_ci[d]);
      const double ratio = std::abs(a.w[d] - b.w[d]) / allowed;
      spec_worst = std::max(spec_worst, ratio);
      if (ratio > 1.0) ++bad;
    }
    worst = std::max(worst, spec_worst);
    detail(spec_text(s) + ": max |dw| / 2CI = " + fmt(spec_worst));
  }
  return {bad == 0, "logistic vs piecewise-linear speed tables on 5 specs: max |dw|/(2 CI) = " + fmt(worst) + ", " +
                        std::to_string(bad) + " directions outside"};
}

Verdict homogenization_sandwich() {
  Clock clock;
  const EnvironmentSpec s = random_kpp();
  SpeedTableOptions opt;
  opt.directions = 32;
  opt.radius = 24.0;
  opt.samples = 4;
  opt.master = 808;
  opt.front.h = 0.5;
  const DirectionalSpeedTable table = estimate_speed_table(s, opt);
  ScaledExperiment exp;
  exp.shape = assemble_shape(table);
  exp.initial = Disk{{0.0, 0.0}, 1.0};
  exp.epsilons = {0.125, 0.0625, 0.03125};
  exp.delta = 0.25;
  exp.level = 0.5;
  exp.times = {0.5, 1.0, 2.0};
  exp.front.h = 0.5;
  exp.check();
  detail("shape speeds in [" + fmt(exp.shape.min_speed()) + ", " + fmt(exp.shape.max_speed()) + "], " +
         fmt(clock.seconds(), 3) + " s");
  std::vector<Proportion> rates;
  for (std::size_t e = 0; e < exp.epsilons.size(); ++e) {
    Proportion p;
    std::vector<double> worst_inner(exp.times.size(), 1e9), worst_outer(exp.times.size(), 1e9);
    for (int k = 0; k < 50; ++k) {
      const Seed seed = derive_seed(809, {static_cast<std::int64_t>(e), k});
      const auto res = sandwich_run(exp, s, exp.epsilons[e], seed);
      bool all = true;
      for (std::size_t i = 0; i < res.size(); ++i) {
        all = all && res[i].pass();
        worst_inner[i] = std::min(worst_inner[i], res[i].inner_margin);
        worst_outer[i] = std::min(worst_outer[i], res[i].outer_margin);
      }
      ++p.trials;
      if (all) ++p.passes;
    }
    rates.push_back(p);
    const Interval w = wilson_interval(p);
    std::string margins;
    for (std::size_t i = 0; i < exp.times.size(); ++i)
      margins += " t=" + fmt(exp.times[i]) + ":" + fmt(worst_inner[i], 3) + "/" + fmt(worst_outer[i], 3);
    detail("eps=" + fmt(exp.epsilons[e]) + " pass " + std::to_string(p.passes) + "/50 wilson [" + fmt(w.lo, 3) +
           ", " + fmt(w.hi, 3) + "] worst inner/outer margins" + margins + ", " + fmt(clock.seconds(), 4) + " s");
  }
  const bool trend = non_decreasing_within_wilson(rates);
  const double coarse = rates.front().fraction(), fine = rates.back().fraction();
  const double secs = clock.seconds();
  return {coarse >= 0.7 && fine >= 0.9 && trend && secs < 4 * 3600.0,
          "homogenization sandwich: pass fraction " + fmt(coarse, 3) + " >= 0.7 at eps=1/8, " + fmt(fine, 3) +
              " >= 0.9 at eps=1/32, trend " + (trend ? "holds" : "broken") + ", runtime " + fmt(secs, 4) + " s"};
}

Verdict geq_limit() {
  Clock clock;
  const EnvironmentSpec s = random_geq();
  SpeedTableOptions opt;
  opt.directions = 32;
  opt.radius = 24.0;
  opt.samples = 4;
  opt.master = 909;
  opt.front.h = 0.25;
  opt.front.margin = 3.0;
  const DirectionalSpeedTable table = estimate_speed_table(s, opt);
  ScaledExperiment exp;
  exp.shape = assemble_shape(table);
  exp.initial = Disk{{0.0, 0.0}, 2.0};
  exp.epsilons = {0.0625};
  exp.shift = 1.0;
  exp.front.h = 0.25;
  exp.front.margin = 3.0;
  exp.profile = bump_profile;
  exp.modulus = bump_modulus;
  const auto probes = default_probes({0.5, 1.0}, 3.0, 3, 8);
  Proportion p;
  double worst = 0.0;
  for (int k = 0; k < 20; ++k) {
    const ProbeReport r = geq_limit_check(exp, s, 0.0625, derive_seed(910, {k}), probes, 0.1);
    worst = std::max(worst, r.max_error);
    ++p.trials;
    if (r.max_error <= 0.1) ++p.passes;
  }
  detail("worst max error " + fmt(worst) + ", " + fmt(clock.seconds(), 3) + " s");
  return {p.fraction() >= 0.9, "G-equation limit at eps=1/16: max probe error <= 0.1 on " + std::to_string(p.passes) +
                                   "/20 seeds (need >= 90%)"};
}

Verdict oracle_cross_validation() {
  const EnvironmentSpec s = random_geq();
  const Grid g = make_geq_grid(s, 0.1, 6.5);
  const double t = 3.0;
  const int n = 30;
  const double allowed = (s.flame_max + s.flow_max()) * t / n + 2 * g.h;
  int bad = 0;
  double worst_excess = 0.0;
  int outside = 0;
  for (int k = 0; k < 20; ++k) {
    const Environment env = build_environment(s, derive_seed(1010, {k}));
    const double t0 = 0.37 * k;
    const ReachableSet hj = reachable_set(env, t0, {}, t, g);
    const RegionMask oracle = control_oracle(env, t0, {}, t, n, 16, g);
    const int out = count_outside_dilation(oracle, hj.mask, std::sqrt(2.0) * g.h + 1e-9);
    const double excess = directed_hausdorff(hj.mask, oracle);
    outside += out;
    worst_excess = std::max(worst_excess, excess);
    if (out > 0 || excess > allowed) ++bad;
  }
  return {bad == 0, "oracle cross-validation on 20 seeds: " + std::to_string(outside) +
                        " oracle nodes outside the HJ set, worst excess " + fmt(worst_excess) + " <= " + fmt(allowed)};
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

Verdict determinism() {
  ExperimentConfig cfg;
  cfg.kind = ExperimentKind::FullPipeline;
  cfg.seed = 1111;
  cfg.environment = random_kpp();
  cfg.environment.seed = cfg.seed;
  cfg.solver.h = 0.25;
  cfg.calibration.seeds = 2;
  cfg.calibration.horizon = 6.0;
  cfg.speed_table.directions = 8;
  cfg.speed_table.radius = 8.0;
  cfg.speed_table.samples = 2;
  cfg.scaled.epsilons = {0.25, 0.125};
  cfg.scaled.seeds = 3;
  cfg.flow_samples = 20;
  const auto base = std::filesystem::temp_directory_path() / ("homog_acceptance_" + std::to_string(::getpid()));
  std::vector<std::string> files{"summary.csv", "speed_table.csv", "shape.csv", "sandwich.csv", "sandwich_rates.csv"};
  std::vector<std::string> runs[2];
  for (int r = 0; r < 2; ++r) {
    cfg.output = (base / ("run" + std::to_string(r))).string();
    std::ostringstream log;
    const RunResult res = run_experiment(cfg, "acceptance", log);
    detail("run " + std::to_string(r) + " exit code " + std::to_string(res.exit_code));
    for (const auto& f : files) runs[r].push_back(slurp(std::filesystem::path(cfg.output) / f));
  }
  std::filesystem::remove_all(base);
  int differ = 0;
  for (std::size_t k = 0; k < files.size(); ++k) {
    if (runs[0][k].empty() || runs[0][k] != runs[1][k]) {
      ++differ;
      detail(files[k] + (runs[0][k].empty() ? " missing" : " differs"));
    }
  }
  return {differ == 0, "determinism: full_pipeline twice at seed 1111, " + std::to_string(files.size() - differ) +
                           "/" + std::to_string(files.size()) + " outputs byte-identical"};
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::function<Verdict()>> criteria{
      speed_constant_kpp,     speed_constant_flow,   structural_inequalities,  subadditive_testbed,
      comparison_principle,   wulff_convexity,       reaction_independence,    homogenization_sandwich,
      geq_limit,              oracle_cross_validation, determinism};
  const int id = argc > 1 ? std::atoi(argv[1]) : 0;
  if (id < 1 || id > static_cast<int>(criteria.size())) {
    std::cerr << "usage: acceptance <1.." << criteria.size() << ">\n";
    return 2;
  }
  char tag[16];
  std::snprintf(tag, sizeof tag, "%02d", id);
  Verdict v;
  try {
    v = criteria[id - 1]();
  } catch (const std::exception& e) {
    v = {false, std::string("error: ") + e.what()};
  }
  std::cout << (v.pass ? "PASS " : "FAIL ") << tag << " " << v.summary << "\n";
  return v.pass ? 0 : 1;
}
