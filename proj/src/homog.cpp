#include "homog/homog.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>

#include "homog/geq.hpp"

namespace homog {

double signed_distance(const InitialSet& g, Point x) {
  if (const auto* d = std::get_if<Disk>(&g)) return norm(x - d->center) - d->radius;
  return std::get<ConvexPolygon>(g).signed_distance(x);
}

double set_radius(const InitialSet& g) {
  if (const auto* d = std::get_if<Disk>(&g)) return norm(d->center) + d->radius;
  double r = 0.0;
  for (Point v : std::get<ConvexPolygon>(g).vertices) r = std::max(r, norm(v));
  return r;
}

double signed_distance_sum(const InitialSet& g, double t, const WulffShape& shape, Point x) {
  if (t <= 0.0) return signed_distance(g, x);
  if (const auto* d = std::get_if<Disk>(&g)) return signed_distance_disk_sum(*d, shape.hull().scaled(t), x);
  return minkowski_sum(std::get<ConvexPolygon>(g), t, shape).signed_distance(x);
}

double ScaledExperiment::rho(double eps) const {
  return rho_scale == 0.0 ? 0.0 : rho_scale * std::pow(eps, rho_power);
}

Point ScaledExperiment::offset(double eps) const {
  const auto it = std::find(epsilons.begin(), epsilons.end(), eps);
  const std::size_t i = it == epsilons.end() ? 0 : static_cast<std::size_t>(it - epsilons.begin());
  const double sign = i % 2 == 0 ? 1.0 : -1.0;
  return {sign * 0.5 * shift, 0.0};
}

void ScaledExperiment::check() const {
  if (!(delta > 0.0 && delta < 1.0)) throw InvalidSpec("delta must lie in (0, 1)");
  if (!(level > 0.0 && level < 1.0)) throw InvalidSpec("level must lie in (0, 1)");
  if (!(height > 0.0 && height <= 1.0)) throw InvalidSpec("datum height must lie in (0, 1]");
  if (epsilons.empty() || !std::is_sorted(epsilons.rbegin(), epsilons.rend()))
    throw InvalidSpec("eps list must be decreasing");
  for (double e : epsilons)
    if (!(e > 0.0)) throw InvalidSpec("eps must be positive");
  if (set_radius(initial) > 1.0 / delta) throw InvalidSpec("initial set must lie in the ball of radius 1/delta");
  if (shift < 0.0) throw InvalidSpec("shift bound must be nonnegative");
}

double ScaledRun::value_at(std::size_t snapshot, Point x_scaled) const {
  const Point X = (1.0 / eps) * (x_scaled + offset);
  const auto& f = values[snapshot];
  const Grid& g = grid;
  const int m = g.half_nodes();
  const double fx = (X.x - g.center.x) / g.h + m;
  const double fy = g.dim == 1 ? 0.0 : (X.y - g.center.y) / g.h + m;
  if (fx < 0 || fx > g.nx() - 1 || fy < 0 || fy > g.ny() - 1) return 0.0;
  const int i = std::min(static_cast<int>(fx), g.nx() - 2);
  const double ax = fx - i;
  if (g.dim == 1) return (1 - ax) * f[i] + ax * f[i + 1];
  const int j = std::min(static_cast<int>(fy), g.ny() - 2);
  const double ay = fy - j;
  return (1 - ay) * ((1 - ax) * f[g.index(i, j)] + ax * f[g.index(i + 1, j)]) +
         ay * ((1 - ax) * f[g.index(i, j + 1)] + ax * f[g.index(i + 1, j + 1)]);
}

ScaledRun scaled_solve_kpp(const ScaledExperiment& exp, const EnvironmentSpec& spec, double eps, Seed seed,
                           std::vector<double> times) {
  exp.check();
  std::sort(times.begin(), times.end());
  const Environment env = build_environment(spec, seed);
  ScaledRun run;
  run.eps = eps;
  run.offset = exp.offset(eps);
  const double t_max = times.empty() ? 0.0 : times.back();
  const double half = (set_radius(exp.initial) + kpp_speed_bound(spec) * t_max) / eps + exp.front.margin;
  run.grid = make_kpp_grid(spec, exp.front.h, half, (1.0 / eps) * run.offset, exp.front.cfl_fraction);

  SolutionField sol{run.grid, env, 0.0, 0.0, std::vector<double>(run.grid.size(), 0.0)};
  const double rho = exp.rho(eps);
  std::size_t filled = 0;
  for (std::size_t k = 0; k < sol.u.size(); ++k) {
    if (signed_distance(exp.initial, run.scaled(k)) <= -rho) {
      sol.u[k] = exp.height;
      ++filled;
    }
  }
  if (filled == 0) throw InvalidSpec("eroded initial set contains no grid node");

  KppSolver solver(env, exp.front.reaction, run.grid);
  for (double t : times) {
    solver.solve_until(sol, t / eps);
    run.times.push_back(t);
    run.values.push_back(sol.u);
  }
  return run;
}

ScaledRun scaled_solve_geq(const ScaledExperiment& exp, const EnvironmentSpec& spec, double eps, Seed seed,
                           std::vector<double> times) {
  if (!exp.profile) throw InvalidSpec("G-equation experiment needs an initial profile");
  std::sort(times.begin(), times.end());
  const Environment env = build_environment(spec, seed);
  ScaledRun run;
  run.eps = eps;
  run.offset = exp.offset(eps);
  const double t_max = times.empty() ? 0.0 : times.back();
  const double half = (set_radius(exp.initial) + (spec.flame_max + spec.flow_max()) * t_max + 0.5) / eps;
  run.grid = make_geq_grid(spec, exp.front.h, half, (1.0 / eps) * run.offset, exp.front.cfl_fraction);

  LevelFunction lf{run.grid, env, 0.0, 0.0, std::vector<double>(run.grid.size())};
  for (std::size_t k = 0; k < lf.phi.size(); ++k) lf.phi[k] = exp.profile(run.scaled(k));
  HjSolver solver(env, run.grid);
  for (double t : times) {
    solver.solve_until(lf, t / eps);
    run.times.push_back(t);
    run.values.push_back(lf.phi);
  }
  return run;
}

SandwichResult sandwich_check(const ScaledExperiment& exp, const ScaledRun& run, std::size_t snapshot, Seed seed) {
  SandwichResult r;
  r.eps = run.eps;
  r.t = run.times[snapshot];
  r.seed = seed;
  const double t = r.t;
  const double window = 1.0 / exp.delta;
  const auto& u = run.values[snapshot];
  const ConvexPolygon inner_shape = exp.shape.hull().scaled((1.0 - exp.delta) * t);
  const ConvexPolygon outer_shape = exp.shape.hull().scaled((1.0 + exp.delta) * t);
  auto sd = [&](const ConvexPolygon& s, Point x) {
    if (const auto* d = std::get_if<Disk>(&exp.initial)) return signed_distance_disk_sum(*d, s, x);
    return minkowski_sum(std::get<ConvexPolygon>(exp.initial), s).signed_distance(x);
  };
  // Polygonal G: build both sums once.
  std::optional<ConvexPolygon> inner_poly, outer_poly;
  if (const auto* g = std::get_if<ConvexPolygon>(&exp.initial)) {
    inner_poly = minkowski_sum(*g, inner_shape);
    outer_poly = minkowski_sum(*g, outer_shape);
  }
  double inner_margin = std::numeric_limits<double>::infinity();
  double outer_margin = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < u.size(); ++k) {
    const Point x = run.scaled(k);
    if (norm(x) > window) continue;
    const bool on = u[k] >= exp.level;
    if (!on) {
      const double d = inner_poly ? inner_poly->signed_distance(x) : sd(inner_shape, x);
      inner_margin = std::min(inner_margin, d);
    } else {
      const double d = outer_poly ? outer_poly->signed_distance(x) : sd(outer_shape, x);
      outer_margin = std::min(outer_margin, -d);
    }
  }
  r.inner_margin = inner_margin;
  r.outer_margin = outer_margin;
  r.inner = inner_margin > 0.0;
  r.outer = outer_margin >= 0.0;
  return r;
}

std::vector<SandwichResult> sandwich_run(const ScaledExperiment& exp, const EnvironmentSpec& spec, double eps,
                                         Seed seed) {
  const ScaledRun run = scaled_solve_kpp(exp, spec, eps, seed, exp.times);
  std::vector<SandwichResult> out;
  for (std::size_t s = 0; s < run.times.size(); ++s) out.push_back(sandwich_check(exp, run, s, seed));
  return out;
}

namespace {

std::vector<double> probe_times(const std::vector<Probe>& probes) {
  std::vector<double> t;
  for (const auto& p : probes) t.push_back(p.t);
  std::sort(t.begin(), t.end());
  t.erase(std::unique(t.begin(), t.end()), t.end());
  return t;
}

std::size_t snapshot_of(const ScaledRun& run, double t) {
  return static_cast<std::size_t>(std::find(run.times.begin(), run.times.end(), t) - run.times.begin());
}

}  // namespace

ProbeReport pointwise_limit_check(const ScaledExperiment& exp, const EnvironmentSpec& spec, double eps, Seed seed,
                                  const std::vector<Probe>& probes, double clearance, double tol) {
  const ScaledRun run = scaled_solve_kpp(exp, spec, eps, seed, probe_times(probes));
  ProbeReport rep;
  for (const auto& p : probes) {
    ProbeOutcome o;
    o.probe = p;
    o.value = run.value_at(snapshot_of(run, p.t), p.x);
    const double d = signed_distance_sum(exp.initial, p.t, exp.shape, p.x);
    o.allowed = tol;
    if (d <= -clearance) {
      o.checked = true;
      o.expected = 1.0;
    } else if (d >= clearance) {
      o.checked = true;
      o.expected = 0.0;
    }
    if (o.checked) {
      o.error = std::abs(o.value - o.expected);
      o.ok = o.error <= tol;
      rep.max_error = std::max(rep.max_error, o.error);
      if (!o.ok) ++rep.failures;
    }
    rep.outcomes.push_back(o);
  }
  return rep;
}

double dilation_limit(const std::function<double(Point)>& u0, const WulffShape& shape, double t, Point x,
                      double spacing) {
  if (t <= 0.0) return u0(x);
  const ConvexPolygon s = shape.hull().scaled(t);
  double best = -std::numeric_limits<double>::infinity();
  // Boundary first: vertices and edges.
  const auto& v = s.vertices;
  for (std::size_t k = 0; k < v.size(); ++k) {
    const Point a = v[k], b = v[(k + 1) % v.size()];
    const int n = std::max(1, static_cast<int>(std::ceil(norm(b - a) / spacing)));
    for (int i = 0; i < n; ++i) best = std::max(best, u0(x - (a + (double(i) / n) * (b - a))));
  }
  double lo_x = 1e300, hi_x = -1e300, lo_y = 1e300, hi_y = -1e300;
  for (Point p : v) {
    lo_x = std::min(lo_x, p.x);
    hi_x = std::max(hi_x, p.x);
    lo_y = std::min(lo_y, p.y);
    hi_y = std::max(hi_y, p.y);
  }
  for (double px = lo_x; px <= hi_x; px += spacing) {
    for (double py = lo_y; py <= hi_y; py += spacing) {
      const Point q{px, py};
      if (s.contains(q)) best = std::max(best, u0(x - q));
    }
  }
  return best;
}

ProbeReport geq_limit_check(const ScaledExperiment& exp, const EnvironmentSpec& spec, double eps, Seed seed,
                            const std::vector<Probe>& probes, double tol) {
  const ScaledRun run = scaled_solve_geq(exp, spec, eps, seed, probe_times(probes));
  ProbeReport rep;
  for (const auto& p : probes) {
    ProbeOutcome o;
    o.probe = p;
    o.checked = true;
    o.value = run.value_at(snapshot_of(run, p.t), p.x);
    o.expected = dilation_limit(exp.profile, exp.shape, p.t, p.x);
    o.error = std::abs(o.value - o.expected);
    o.allowed = tol;
    o.ok = o.error <= tol;
    rep.max_error = std::max(rep.max_error, o.error);
    if (!o.ok) ++rep.failures;
    rep.outcomes.push_back(o);
  }
  return rep;
}

std::vector<Probe> default_probes(const std::vector<double>& times, double radius, int rings, int angles) {
  std::vector<Probe> out;
  for (double t : times) {
    out.push_back({t, {0.0, 0.0}});
    for (int r = 1; r <= rings; ++r) {
      for (int a = 0; a < angles; ++a) {
        out.push_back({t, (radius * r / rings) * unit_direction(2.0 * std::numbers::pi * (a + 0.5 * (r % 2)) / angles)});
      }
    }
  }
  return out;
}

Interval wilson_interval(const Proportion& p, double z) {
  if (p.trials == 0) return {0.0, 1.0};
  const double n = p.trials;
  const double f = p.fraction();
  const double z2 = z * z;
  const double centre = (f + z2 / (2 * n)) / (1 + z2 / n);
  const double half = z * std::sqrt(f * (1 - f) / n + z2 / (4 * n * n)) / (1 + z2 / n);
  return {std::max(0.0, centre - half), std::min(1.0, centre + half)};
}

bool non_decreasing_within_wilson(const std::vector<Proportion>& by_eps, double z) {
  for (std::size_t k = 1; k < by_eps.size(); ++k) {
    if (by_eps[k].fraction() < wilson_interval(by_eps[k - 1], z).lo) return false;
  }
  return true;
}

double bump_profile(Point x) {
  const double q = 1.0 - dot(x, x) / 4.0;
  return q > 0.0 ? q * q : 0.0;
}

double bump_modulus(double r) { return std::min(1.0, 0.7698003589195010 * r); }

}  // namespace homog
