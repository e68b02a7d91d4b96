#include "homog/ttime.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace homog {

double m_guess(const EnvironmentSpec& spec) {
  if (spec.mode == EnvMode::Kpp) return kpp_speed_bound(spec) + 1.0;
  const double slowest = std::max(spec.flame_min - spec.flow_max(), 0.1 * spec.flame_min);
  return std::max(spec.flame_max + spec.flow_max(), 1.0 / slowest) + 1.0;
}

namespace {

double max_distance(Point x0, std::span<const Point> targets) {
  double d = 0.0;
  for (Point x : targets) d = std::max(d, norm(x - x0));
  return d;
}

double dyadic_floor(double v) { return std::exp2(std::floor(std::log2(v))); }

std::string point_text(Point p) {
  std::ostringstream os;
  os.precision(17);
  os << "(" << p.x << "," << p.y << ")";
  return os.str();
}

// Bilinear interpolation of a node field at p.
double interpolate(const Grid& g, std::span<const double> f, Point p) {
  const int m = g.half_nodes();
  const double fx = (p.x - g.center.x) / g.h + m;
  const int i = std::clamp(static_cast<int>(std::floor(fx)), 0, g.nx() - 2);
  const double ax = std::clamp(fx - i, 0.0, 1.0);
  if (g.dim == 1) return (1 - ax) * f[i] + ax * f[i + 1];
  const double fy = (p.y - g.center.y) / g.h + m;
  const int j = std::clamp(static_cast<int>(std::floor(fy)), 0, g.ny() - 2);
  const double ay = std::clamp(fy - j, 0.0, 1.0);
  const double lo = (1 - ax) * f[g.index(i, j)] + ax * f[g.index(i + 1, j)];
  const double hi = (1 - ax) * f[g.index(i, j + 1)] + ax * f[g.index(i + 1, j + 1)];
  return (1 - ay) * lo + ay * hi;
}

struct Tracker {
  std::vector<TravelTimeRecord> records;
  std::vector<bool> done;
  std::size_t remaining = 0;
  double next_sample = 0.0;
};

}  // namespace

TravelRun travel_times_kpp(const Environment& env, double t0, Point x0, std::span<const Point> targets,
                           const FrontOptions& opt) {
  const auto& spec = env.spec();
  const double dmax = max_distance(x0, targets);
  double half = dmax * (1.0 + opt.box_slack) + 1.0 + opt.margin;
  if (opt.horizon > 0.0) half = std::max(half, 1.0 + kpp_speed_bound(spec) * opt.horizon + opt.margin);
  Grid grid = make_kpp_grid(spec, opt.h, half, x0, opt.cfl_fraction);
  if (opt.dyadic_dt) grid.dt = dyadic_floor(grid.dt);

  TravelRun run;
  run.grid = grid;
  SolutionField sol = init_ball_datum(grid, env, x0, 0.5, t0);
  KppSolver solver(env, opt.reaction, grid);

  std::vector<std::vector<std::size_t>> balls;
  Tracker tr;
  for (Point x : targets) {
    balls.push_back(ball_nodes(grid, x, 1.0));
    tr.records.push_back({t0, x0, x, -1.0, FrontKind::Kpp, env.seed(), grid.describe()});
  }
  tr.done.assign(targets.size(), false);
  tr.remaining = targets.size();

  auto scan = [&](const SolutionField& s) {
    for (std::size_t n = 0; n < balls.size(); ++n) {
      if (tr.done[n]) continue;
      const bool full = std::all_of(balls[n].begin(), balls[n].end(), [&](std::size_t k) { return s.u[k] >= 0.5; });
      if (full) {
        tr.done[n] = true;
        tr.records[n].tau = s.time;
        --tr.remaining;
      }
    }
    if (opt.sample_every > 0.0 && s.time >= tr.next_sample - 1e-12) {
      const FrontRadii r = front_radii(grid, s.u, 0.5, x0);
      run.front.push_back({s.time, r.inner, r.outer});
      tr.next_sample += opt.sample_every;
    }
  };
  scan(sol);

  const double deadline = std::max(opt.deadline_factor * m_guess(spec) * (dmax + 1.0), opt.horizon);
  solver.solve_until(sol, deadline, [&](const SolutionField& s) {
    scan(s);
    return tr.remaining > 0 || s.time < opt.horizon;
  });
  if (tr.remaining > 0) {
    std::ostringstream os;
    os << "travel time not reached by the deadline " << deadline << " (seed " << env.seed() << ", t0=" << t0
       << ", x0=" << point_text(x0) << ")";
    throw NumericalAnomaly(os.str());
  }
  run.records = std::move(tr.records);
  return run;
}

TravelTimeRecord travel_time_kpp(const Environment& env, double t0, Point x0, Point x, const FrontOptions& opt) {
  const Point targets[] = {x};
  return travel_times_kpp(env, t0, x0, targets, opt).records.front();
}

TravelRun arrival_times_geq(const Environment& env, double t0, Point x0, std::span<const Point> targets,
                            const FrontOptions& opt) {
  const auto& spec = env.spec();
  const double dmax = max_distance(x0, targets);
  double half = dmax * (1.0 + opt.box_slack) + opt.margin;
  if (opt.horizon > 0.0) half = std::max(half, (spec.flame_max + spec.flow_max()) * opt.horizon + opt.margin);
  Grid grid = make_geq_grid(spec, opt.h, half, x0, opt.cfl_fraction);
  if (opt.dyadic_dt) grid.dt = dyadic_floor(grid.dt);

  TravelRun run;
  run.grid = grid;
  LevelFunction lf = distance_datum(grid, env, x0, t0);
  HjSolver solver(env, grid);

  Tracker tr;
  for (Point x : targets) tr.records.push_back({t0, x0, x, -1.0, FrontKind::Geq, env.seed(), grid.describe()});
  tr.done.assign(targets.size(), false);
  tr.remaining = targets.size();

  // Crossing times are interpolated linearly between steps.
  std::vector<double> last(targets.size(), -std::numeric_limits<double>::infinity());
  double last_time = 0.0;
  auto scan = [&](const LevelFunction& s) {
    const double level = -grid.h;
    for (std::size_t n = 0; n < targets.size(); ++n) {
      if (tr.done[n]) continue;
      const double value = interpolate(grid, s.phi, targets[n]);
      if (value >= level) {
        tr.done[n] = true;
        const bool between = std::isfinite(last[n]) && value > last[n];
        tr.records[n].tau = between ? last_time + (s.time - last_time) * (level - last[n]) / (value - last[n]) : s.time;
        --tr.remaining;
      }
      last[n] = value;
    }
    last_time = s.time;
    if (opt.sample_every > 0.0 && s.time >= tr.next_sample - 1e-12) {
      const FrontRadii r = front_radii(grid, s.phi, -grid.h, x0);
      run.front.push_back({s.time, r.inner, r.outer});
      tr.next_sample += opt.sample_every;
    }
  };
  scan(lf);

  const double deadline = std::max(opt.deadline_factor * m_guess(spec) * (dmax + 1.0), opt.horizon);
  solver.solve_until(lf, deadline, [&](const LevelFunction& s) {
    scan(s);
    return tr.remaining > 0 || s.time < opt.horizon;
  });
  if (tr.remaining > 0) {
    std::ostringstream os;
    os << "arrival time not reached by the deadline " << deadline << " (seed " << env.seed() << ", t0=" << t0
       << ", x0=" << point_text(x0) << ")";
    throw NumericalAnomaly(os.str());
  }
  run.records = std::move(tr.records);
  return run;
}

TravelTimeRecord arrival_time_geq(const Environment& env, double t0, Point x0, Point x, const FrontOptions& opt) {
  const Point targets[] = {x};
  return arrival_times_geq(env, t0, x0, targets, opt).records.front();
}

TravelTimeRecord front_time(const Environment& env, double t0, Point x0, Point x, const FrontOptions& opt) {
  return env.spec().mode == EnvMode::Kpp ? travel_time_kpp(env, t0, x0, x, opt)
                                         : arrival_time_geq(env, t0, x0, x, opt);
}

namespace {

TravelRun front_times(const Environment& env, double t0, Point x0, std::span<const Point> targets,
                      const FrontOptions& opt) {
  return env.spec().mode == EnvMode::Kpp ? travel_times_kpp(env, t0, x0, targets, opt)
                                         : arrival_times_geq(env, t0, x0, targets, opt);
}

std::string reproduce(const Environment& env, double t0, Point x0, Point z, Point x, const Grid& g) {
  std::ostringstream os;
  os.precision(17);
  os << "seed=" << env.seed() << " t0=" << t0 << " x0=" << point_text(x0) << " z=" << point_text(z)
     << " x=" << point_text(x) << " grid=" << g.describe();
  return os.str();
}

}  // namespace

double inequality_tolerance(const Grid& grid, double m_emp) { return 2.0 * grid.dt + 4.0 * grid.h * m_emp; }

InequalityReport check_subadditivity(const Environment& env, double t0, Point x0, Point z, Point x,
                                     const FrontOptions& opt, double m_emp) {
  const Point targets[] = {x, z};
  const TravelRun first = front_times(env, t0, x0, targets, opt);
  const double direct = first.records[0].tau;
  const double leg1 = first.records[1].tau;
  const double leg2 = front_time(env, t0 + leg1, z, x, opt).tau;
  InequalityReport r;
  r.name = "subadditivity";
  r.lhs = direct;
  r.rhs = leg1 + leg2;
  r.tolerance = inequality_tolerance(first.grid, m_emp);
  r.reproduce = reproduce(env, t0, x0, z, x, first.grid);
  return r;
}

InequalityReport check_restart_monotonicity(const Environment& env, double t0, Point x0, Point z, Point x,
                                            double t, const FrontOptions& opt, double m_emp) {
  if (t < m_emp * (norm(z - x0) + 1.0) * (1.0 - 1e-12))
    throw InvalidSpec("restart check needs t >= M (|z - x0| + 1)");
  const Point targets[] = {x};
  const TravelRun first = front_times(env, t0, x0, targets, opt);
  const double later = front_time(env, t0 + t, z, x, opt).tau;
  InequalityReport r;
  r.name = "restart_monotonicity";
  r.lhs = first.records[0].tau;
  r.rhs = later + t;
  r.tolerance = inequality_tolerance(first.grid, m_emp);
  r.reproduce = reproduce(env, t0, x0, z, x, first.grid) + " t=" + std::to_string(t);
  return r;
}

InequalityReport check_lipschitz_in_target(const Environment& env, double t0, Point x0, Point x, Point z,
                                           const FrontOptions& opt, double m_emp) {
  const Point targets[] = {x, z};
  const TravelRun run = front_times(env, t0, x0, targets, opt);
  InequalityReport r;
  r.name = "target_lipschitz";
  r.lhs = run.records[0].tau;
  r.rhs = run.records[1].tau + m_emp * (norm(x - z) + 1.0);
  r.tolerance = inequality_tolerance(run.grid, m_emp);
  r.reproduce = reproduce(env, t0, x0, z, x, run.grid);
  return r;
}

InequalityReport check_linear_bound(const TravelTimeRecord& rec, double m_emp, double tolerance) {
  InequalityReport r;
  r.name = "linear_bound";
  r.lhs = rec.tau;
  r.rhs = m_emp * (norm(rec.x - rec.x0) + 1.0);
  r.tolerance = tolerance;
  std::ostringstream os;
  os << "seed=" << rec.seed << " t0=" << rec.t0 << " x0=" << point_text(rec.x0) << " x=" << point_text(rec.x)
     << " grid=" << rec.grid;
  r.reproduce = os.str();
  return r;
}

SandwichCount check_ball_sandwich(std::span<const FrontSample> front, double m_emp, double h) {
  SandwichCount c;
  c.worst_margin = std::numeric_limits<double>::infinity();
  for (const auto& s : front) {
    if (s.t < m_emp) continue;
    ++c.samples;
    const double inner_margin = s.inner - s.t / m_emp + h;
    const double outer_margin = m_emp * s.t + h - s.outer;
    const double m = std::min(inner_margin, outer_margin);
    c.worst_margin = std::min(c.worst_margin, m);
    if (m < 0.0) ++c.violations;
  }
  if (c.samples == 0) c.worst_margin = 0.0;
  return c;
}

MCalibration calibrate_m(const EnvironmentSpec& spec, const FrontOptions& opt, int seeds, double horizon,
                         Seed master) {
  MCalibration cal;
  cal.seeds = seeds;
  FrontOptions o = opt;
  o.horizon = horizon;
  if (o.sample_every <= 0.0) o.sample_every = 0.25;
  // KPP fronts start from the unit ball; level-set fronts from a point.
  const double seeded_radius = spec.mode == EnvMode::Kpp ? 1.0 : o.h;
  for (int k = 0; k < seeds; ++k) {
    const Environment env = build_environment(spec, derive_seed(master, {k}));
    const TravelRun run = front_times(env, 0.0, {}, {}, o);
    double trigger = horizon;
    for (std::size_t n = run.front.size(); n-- > 0;) {
      if (run.front[n].inner <= seeded_radius || run.front[n].t == 0.0) break;
      trigger = run.front[n].t;
    }
    double outer = 0.0;
    double slowness = 0.0;
    for (const auto& s : run.front) {
      if (s.t < trigger || s.t <= 0.0) continue;
      outer = std::max(outer, s.outer / s.t);
      slowness = std::max(slowness, s.t / s.inner);
    }
    cal.hair_trigger = std::max(cal.hair_trigger, trigger);
    cal.outer_speed = std::max(cal.outer_speed, outer);
    cal.inner_slowness = std::max(cal.inner_slowness, slowness);
  }
  cal.m_emp = 1.5 * std::max({cal.hair_trigger, cal.outer_speed, cal.inner_slowness});
  return cal;
}

}  // namespace homog
