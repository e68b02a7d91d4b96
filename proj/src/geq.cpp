#include "homog/geq.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

namespace homog {

double geq_step_dt(const EnvironmentSpec& spec, double h) {
  return geq_max_cells * h / (spec.flow_max() + spec.flame_max);
}

Grid make_geq_grid(const EnvironmentSpec& spec, double h, double half_width, Point center, double cfl_fraction) {
  Grid g;
  g.dim = spec.dim;
  g.h = h;
  g.half_width = half_width;
  g.center = center;
  g.dt = cfl_fraction * geq_step_dt(spec, h);
  return g;
}

LevelFunction distance_datum(const Grid& grid, Environment env, Point x0, double t0) {
  LevelFunction lf{grid, std::move(env), t0, 0.0, std::vector<double>(grid.size())};
  for (std::size_t k = 0; k < lf.phi.size(); ++k)
    lf.phi[k] = std::max(-norm(grid.node(k) - x0), -grid.half_width);
  return lf;
}

LevelFunction sample_datum(const Grid& grid, Environment env, const std::function<double(Point)>& u0, double t0) {
  LevelFunction lf{grid, std::move(env), t0, 0.0, std::vector<double>(grid.size())};
  for (std::size_t k = 0; k < lf.phi.size(); ++k) lf.phi[k] = u0(grid.node(k));
  return lf;
}

HjSolver::HjSolver(Environment env, const Grid& grid, int n_controls)
    : env_(env), grid_(grid), flame_(env, grid, 0, {Field::Flame}), controls_(control_set(grid.dim, n_controls)) {
  const auto& s = env_.spec();
  if (s.mode != EnvMode::Geq) throw InvalidSpec("HJ solver needs a G-equation environment");
  if (grid.dim != s.dim) throw InvalidSpec("grid and environment dimensions differ");
  if (!(grid.dt > 0.0) || grid.dt > geq_step_dt(s, grid.h) * (1.0 + 1e-12))
    throw CflViolation("HJ time step exceeds the step bound: dt=" + std::to_string(grid.dt) +
                       " bound=" + std::to_string(geq_step_dt(s, grid.h)));
  if (s.stream_amplitude > 0.0) stream_.emplace(env, grid, 1, std::vector<Field>{Field::Stream});
}

void HjSolver::flow_at(double t, std::vector<double>& vx, std::vector<double>& vy) {
  const Point mean = env_.spec().mean_flow;
  vx.assign(grid_.size(), mean.x);
  vy.assign(grid_.size(), mean.y);
  if (!stream_) return;
  const auto psi = stream_->at(Field::Stream, t);
  const int stride = stream_->stride();
  const int nx = grid_.nx();
  const int ny = grid_.ny();
  const double i2h = 0.5 / grid_.h;
  auto at = [&](int i, int j) { return psi[static_cast<std::size_t>(j + 1) * stride + (i + 1)]; };
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      const std::size_t k = grid_.index(i, j);
      vx[k] += (at(i, j + 1) - at(i, j - 1)) * i2h;
      vy[k] -= (at(i + 1, j) - at(i - 1, j)) * i2h;
    }
  }
}

void HjSolver::step(LevelFunction& lf, double dt) {
  if (dt > grid_.dt * (1.0 + 1e-12) || dt < 0.0) throw CflViolation("step longer than the grid step");
  const double t = lf.absolute_time() + 0.5 * dt;
  const auto c = flame_.at(Field::Flame, t);
  flow_at(t, vx_, vy_);
  const int nx = grid_.nx();
  const int ny = grid_.ny();
  const double s = dt / grid_.h;
  const double xmax = nx - 1;
  const double ymax = ny - 1;
  const bool two = grid_.dim == 2;
  const auto& phi = lf.phi;
  next_.resize(phi.size());
  // Bilinear weights at fractional node coordinates, clamped into the box.
  struct Stencil {
    std::size_t k;
    double ax, ay;
  };
  auto stencil = [&](double fx, double fy) {
    fx = std::clamp(fx, 0.0, xmax);
    const int i = std::min(static_cast<int>(fx), nx - 2);
    if (!two) return Stencil{static_cast<std::size_t>(i), fx - i, 0.0};
    fy = std::clamp(fy, 0.0, ymax);
    const int j = std::min(static_cast<int>(fy), ny - 2);
    return Stencil{grid_.index(i, j), fx - i, fy - j};
  };
  auto apply = [&](const Stencil& w, const double* f) {
    const double lo = (1.0 - w.ax) * f[w.k] + w.ax * f[w.k + 1];
    if (!two) return lo;
    const double hi = (1.0 - w.ax) * f[w.k + nx] + w.ax * f[w.k + nx + 1];
    return (1.0 - w.ay) * lo + w.ay * hi;
  };
  const double* cf = c.data();
  const double* vxf = vx_.data();
  const double* vyf = vy_.data();
  int bad = 0;
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      const std::size_t k = grid_.index(i, j);
      double best = -std::numeric_limits<double>::infinity();
      for (Point a : controls_) {
        // Midpoint rule for the foot of the characteristic.
        const Stencil m = stencil(i - 0.5 * s * (vxf[k] + cf[k] * a.x), j - 0.5 * s * (vyf[k] + cf[k] * a.y));
        const double cm = apply(m, cf);
        const double dx = s * (apply(m, vxf) + cm * a.x);
        const double dy = two ? s * (apply(m, vyf) + cm * a.y) : 0.0;
        best = std::max(best, apply(stencil(i - dx, j - dy), phi.data()));
      }
      next_[k] = best;
      bad |= !std::isfinite(best);
    }
  }
  if (bad) {
    std::ostringstream os;
    os << "level function became non-finite at t=" << lf.absolute_time();
    throw NumericalAnomaly(os.str());
  }
  lf.phi.swap(next_);
  lf.time += dt;
}

void HjSolver::solve_until(LevelFunction& lf, double T, const Observer& observer) {
  if (T < lf.time) throw InvalidSpec("target time precedes the current time");
  const double start = lf.time;
  std::int64_t k = 0;
  while (true) {
    const double remaining = T - (start + k * grid_.dt);
    if (remaining <= grid_.dt * 1e-9) break;
    if (remaining >= grid_.dt) {
      step(lf, grid_.dt);
      ++k;
      lf.time = start + k * grid_.dt;
    } else {
      step(lf, remaining);
      lf.time = T;
      if (observer) observer(lf);
      break;
    }
    if (observer && !observer(lf)) break;
  }
}

LevelFunction hj_step(LevelFunction lf) {
  HjSolver solver(lf.env, lf.grid);
  solver.step(lf);
  return lf;
}

RegionMask reached_mask(const LevelFunction& lf) {
  RegionMask m(lf.grid);
  for (std::size_t k = 0; k < lf.phi.size(); ++k) m.on[k] = lf.phi[k] >= -lf.grid.h ? 1 : 0;
  return m;
}

ReachableSet reachable_set(const Environment& env, double t0, Point x0, double t, const Grid& grid) {
  const auto& s = env.spec();
  const double reach = (s.flame_max + s.flow_max()) * t + norm(x0 - grid.center);
  if (reach >= grid.half_nodes() * grid.h)
    throw InvalidSpec("reachable set may leave the box: reach " + std::to_string(reach));
  LevelFunction lf = distance_datum(grid, env, x0, t0);
  HjSolver solver(env, grid);
  solver.solve_until(lf, t);
  return {reached_mask(lf), t, t0, x0};
}

std::vector<Point> control_set(int dim, int n_controls) {
  std::vector<Point> out;
  if (dim == 1) {
    out.push_back({1.0, 0.0});
    if (n_controls > 1) out.push_back({-1.0, 0.0});
  } else {
    for (int k = 0; k < n_controls; ++k) out.push_back(unit_direction(2.0 * std::numbers::pi * k / n_controls));
  }
  out.push_back({0.0, 0.0});
  return out;
}

namespace {

struct Rep {
  Point p;
  double key;
};

// One frontier round: every representative moves along each control and
// the best key per destination cell survives.
void propagate(const Environment& env, const Grid& grid, std::span<const Point> controls, double t, double step,
               std::vector<std::size_t>& occupied, std::vector<Rep>& reps, std::vector<std::uint8_t>& on,
               const std::function<double(const Rep&, Point)>& key_of, bool drop_outside) {
  std::vector<std::size_t> next_occ;
  std::vector<Rep> next_reps(reps.size());
  std::vector<std::uint8_t> next_on(on.size(), 0);
  for (std::size_t cell : occupied) {
    const Rep& r = reps[cell];
    const GeqCoefficients co = env.geq(t, r.p);
    for (Point a : controls) {
      const Point q = r.p + step * (co.flow + co.flame * a);
      if (!grid.inside(q)) {
        if (drop_outside) continue;
        std::ostringstream os;
        os << "control frontier left the box at t=" << t << " (" << grid.describe() << ")";
        throw NumericalAnomaly(os.str());
      }
      const std::size_t dest = grid.nearest(q);
      const double key = key_of(r, q);
      if (!next_on[dest]) {
        next_on[dest] = 1;
        next_occ.push_back(dest);
        next_reps[dest] = {q, key};
      } else if (key > next_reps[dest].key) {
        next_reps[dest] = {q, key};
      }
    }
  }
  occupied.swap(next_occ);
  reps.swap(next_reps);
  on.swap(next_on);
}

}  // namespace

RegionMask control_oracle(const Environment& env, double t0, Point x0, double t, int n_steps, int n_controls,
                          const Grid& grid) {
  if (n_steps < 1 || n_controls < 1) throw InvalidSpec("oracle needs positive step and control counts");
  const auto controls = control_set(grid.dim, n_controls);
  std::vector<Rep> reps(grid.size());
  std::vector<std::uint8_t> on(grid.size(), 0);
  const std::size_t c0 = grid.nearest(x0);
  std::vector<std::size_t> occupied{c0};
  reps[c0] = {x0, 0.0};
  on[c0] = 1;
  const double step = t / n_steps;
  // Shorter steps let the per-cell representative stall inside its cell.
  if (env.spec().flame_min * step < 0.5 * grid.h)
    throw InvalidSpec("oracle step moves less than half a cell; use fewer steps or a finer grid");
  auto key = [x0](const Rep&, Point q) { return norm(q - x0); };
  for (int k = 0; k < n_steps; ++k)
    propagate(env, grid, controls, t0 + k * step, step, occupied, reps, on, key, false);
  RegionMask m(grid);
  m.on = std::move(on);
  return m;
}

LevelFunction control_solution(const Environment& env, const std::function<double(Point)>& u0, double t0, double t,
                               int n_steps, int n_controls, const Grid& grid) {
  if (n_steps < 1 || n_controls < 1) throw InvalidSpec("oracle needs positive step and control counts");
  const auto controls = control_set(grid.dim, n_controls);
  std::vector<Rep> reps(grid.size());
  std::vector<std::uint8_t> on(grid.size(), 1);
  std::vector<std::size_t> occupied(grid.size());
  for (std::size_t k = 0; k < grid.size(); ++k) {
    occupied[k] = k;
    reps[k] = {grid.node(k), u0(grid.node(k))};
  }
  const double step = t / n_steps;
  if (env.spec().flame_min * step < 0.5 * grid.h)
    throw InvalidSpec("oracle step moves less than half a cell; use fewer steps or a finer grid");
  auto key = [](const Rep& r, Point) { return r.key; };
  for (int k = 0; k < n_steps; ++k)
    propagate(env, grid, controls, t0 + k * step, step, occupied, reps, on, key, true);

  LevelFunction lf{grid, env, t0, t, std::vector<double>(grid.size())};
  for (std::size_t k = 0; k < grid.size(); ++k) lf.phi[k] = on[k] ? reps[k].key : u0(grid.node(k));
  return lf;
}

Point integrate_path(const Environment& env, double t_start, Point start, std::span<const Point> controls,
                     double duration, int substeps, bool backward) {
  if (controls.empty()) throw InvalidSpec("path needs at least one control");
  const int pieces = static_cast<int>(controls.size());
  const double piece = duration / pieces;
  const double h = piece / substeps;
  const double sign = backward ? -1.0 : 1.0;
  auto rhs = [&](double t, Point x, Point a) {
    const GeqCoefficients c = env.geq(t, x);
    return sign * (c.flow + c.flame * a);
  };
  Point x = start;
  for (int n = 0; n < pieces; ++n) {
    // Backward integration walks the pieces in reverse order.
    const Point a = controls[backward ? pieces - 1 - n : n];
    for (int s = 0; s < substeps; ++s) {
      const double t = t_start + sign * (n * piece + s * h);
      const Point k1 = rhs(t, x, a);
      const Point k2 = rhs(t + sign * 0.5 * h, x + 0.5 * h * k1, a);
      const Point k3 = rhs(t + sign * 0.5 * h, x + 0.5 * h * k2, a);
      const Point k4 = rhs(t + sign * h, x + h * k3, a);
      x += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
  }
  return x;
}

PathStabilityResult path_stability(const Environment& env, double t0, Point x, Point dx, double t, double dt_shift,
                                   std::span<const Point> controls, int substeps) {
  const auto& s = env.spec();
  PathStabilityResult r;
  r.rate = s.flow_max() + s.flow_lipschitz() + s.flame_lipschitz();
  const Point y1 = integrate_path(env, t0 + t, x, controls, t, substeps, true);
  const Point y2 = integrate_path(env, t0 + t + dt_shift, x + dx, controls, t + dt_shift, substeps, true);
  r.origin_gap = norm(y1 - y2);
  r.bound = std::exp(r.rate * std::max(t, t + dt_shift)) * (norm(dx) + r.rate * std::abs(dt_shift));
  return r;
}

}  // namespace homog
