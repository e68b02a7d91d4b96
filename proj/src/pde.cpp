#include "homog/pde.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <sstream>

namespace homog {

double kpp_stable_dt(const EnvironmentSpec& spec, double h) {
  const double rate = 2.0 * spec.dim * spec.diffusion_max / (h * h) +
                      spec.dim * spec.drift_component_max() / h + spec.growth_max;
  return 1.0 / rate;
}

Grid make_kpp_grid(const EnvironmentSpec& spec, double h, double half_width, Point center,
                   double cfl_fraction) {
  Grid g;
  g.dim = spec.dim;
  g.h = h;
  g.half_width = half_width;
  g.center = center;
  g.dt = cfl_fraction * kpp_stable_dt(spec, h);
  return g;
}

double kpp_speed_bound(const EnvironmentSpec& spec) {
  return 2.0 * std::sqrt(spec.diffusion_max * spec.growth_max) + spec.drift_max;
}

SolutionField init_ball_datum(const Grid& grid, Environment env, Point center, double height, double t0,
                              double radius) {
  if (!(height > 0.0 && height <= 1.0)) throw InvalidSpec("datum height must lie in (0, 1]");
  const double reach = grid.half_nodes() * grid.h;
  if (std::abs(center.x - grid.center.x) + radius > reach + 1e-9 ||
      (grid.dim == 2 && std::abs(center.y - grid.center.y) + radius > reach + 1e-9))
    throw InvalidSpec("datum ball outside the box");
  SolutionField sol{grid, std::move(env), t0, 0.0, std::vector<double>(grid.size(), 0.0)};
  for (std::size_t k : ball_nodes(grid, center, radius)) sol.u[k] = height;
  return sol;
}

KppSolver::KppSolver(Environment env, ReactionSpec reaction, const Grid& grid)
    : env_(env),
      reaction_(reaction),
      grid_(grid),
      sampler_(env, grid, 0,
               grid.dim == 2 ? std::vector<Field>{Field::DiffusionX, Field::DiffusionY, Field::DriftX,
                                                  Field::DriftY, Field::Growth}
                             : std::vector<Field>{Field::DiffusionX, Field::DriftX, Field::Growth}) {
  const auto& s = env_.spec();
  if (s.mode != EnvMode::Kpp) throw InvalidSpec("KPP solver needs a KPP environment");
  if (grid.dim != s.dim) throw InvalidSpec("grid and environment dimensions differ");
  if (!(grid.dt > 0.0) || grid.dt > kpp_stable_dt(s, grid.h) * (1.0 + 1e-12))
    throw CflViolation("KPP time step violates the CFL bound: dt=" + std::to_string(grid.dt) +
                       " bound=" + std::to_string(kpp_stable_dt(s, grid.h)));
}

void KppSolver::step(SolutionField& sol, double dt) {
  if (dt > grid_.dt * (1.0 + 1e-12) || dt < 0.0) throw CflViolation("step longer than the CFL step");
  const int nx = grid_.nx();
  const int ny = grid_.ny();
  const double ih = 1.0 / grid_.h;
  const double ih2 = ih * ih;
  const double t = sol.absolute_time();
  const bool two = grid_.dim == 2;

  const double* axx = sampler_.at(Field::DiffusionX, t).data();
  const double* bx = sampler_.at(Field::DriftX, t).data();
  const double* g = sampler_.at(Field::Growth, t).data();
  const double* ayy = two ? sampler_.at(Field::DiffusionY, t).data() : nullptr;
  const double* by = two ? sampler_.at(Field::DriftY, t).data() : nullptr;

  next_.resize(sol.u.size());
  const std::vector<double> zero(two ? nx : 0, 0.0);
  const bool logistic = reaction_.form == ReactionForm::Logistic;
  int bad = 0;

  for (int j = 0; j < ny; ++j) {
    const std::size_t row = static_cast<std::size_t>(j) * nx;
    const double* u = sol.u.data() + row;
    const double* dn = !two ? nullptr : (j > 0 ? u - nx : zero.data());
    const double* up = !two ? nullptr : (j + 1 < ny ? u + nx : zero.data());
    double* out = next_.data() + row;
    for (int i = 0; i < nx; ++i) {
      const std::size_t k = row + i;
      const double c = u[i];
      const double w = i > 0 ? u[i - 1] : 0.0;
      const double e = i + 1 < nx ? u[i + 1] : 0.0;
      const double react = logistic ? g[k] * c * (1.0 - c) : g[k] * std::min(c, 1.0 - c);
      double rhs = axx[k] * (e - 2.0 * c + w) * ih2 +
                   (std::max(bx[k], 0.0) * (e - c) + std::min(bx[k], 0.0) * (c - w)) * ih + react;
      if (two) {
        const double s = dn[i];
        const double n = up[i];
        rhs += ayy[k] * (n - 2.0 * c + s) * ih2 +
               (std::max(by[k], 0.0) * (n - c) + std::min(by[k], 0.0) * (c - s)) * ih;
      }
      const double v = c + dt * rhs;
      out[i] = v;
      bad |= !(v >= -1e-12 && v <= 1.0 + 1e-12);
    }
  }
  if (bad) {
    std::ostringstream os;
    os << "KPP solution left [0,1] or became NaN at t=" << t;
    throw NumericalAnomaly(os.str());
  }
  sol.u.swap(next_);
  sol.time += dt;

  if (guard_) {
    double edge = 0.0;
    if (two) {
      for (int i = 0; i < nx; ++i) {
        edge = std::max({edge, sol.u[grid_.index(i, 0)], sol.u[grid_.index(i, ny - 1)]});
      }
    }
    for (int j = 0; j < ny; ++j) {
      edge = std::max({edge, sol.u[grid_.index(0, j)], sol.u[grid_.index(nx - 1, j)]});
    }
    if (edge > *guard_) {
      std::ostringstream os;
      os << "front reached the box boundary at t=" << sol.absolute_time() << " (u=" << edge << ", "
         << grid_.describe() << ")";
      throw NumericalAnomaly(os.str());
    }
  }
}

void KppSolver::solve_until(SolutionField& sol, double T, const Observer& observer) {
  if (T < sol.time) throw InvalidSpec("target time precedes the current time");
  // Full steps are taken while they fit; the start time plus a step count
  // keeps the clock free of accumulated rounding.
  const double start = sol.time;
  std::int64_t k = 0;
  while (true) {
    const double now = start + k * grid_.dt;
    const double remaining = T - now;
    if (remaining <= grid_.dt * 1e-9) break;
    if (remaining >= grid_.dt) {
      step(sol, grid_.dt);
      ++k;
      sol.time = start + k * grid_.dt;
    } else {
      step(sol, remaining);
      sol.time = T;
      if (observer) observer(sol);
      break;
    }
    if (observer && !observer(sol)) break;
  }
}

SolutionField step(SolutionField sol, const ReactionSpec& reaction) {
  KppSolver solver(sol.env, reaction, sol.grid);
  solver.step(sol);
  return sol;
}

SolutionField solve_until(SolutionField sol, const ReactionSpec& reaction, double T) {
  KppSolver solver(sol.env, reaction, sol.grid);
  solver.solve_until(sol, T);
  return sol;
}

RegionMask superlevel_set(const SolutionField& sol, double level) {
  RegionMask m(sol.grid);
  for (std::size_t k = 0; k < sol.u.size(); ++k) m.on[k] = sol.u[k] >= level ? 1 : 0;
  return m;
}

FrontRadii front_radii(const Grid& grid, std::span<const double> values, double level, Point c) {
  double inner2 = std::numeric_limits<double>::infinity();
  double outer2 = 0.0;
  for (std::size_t k = 0; k < values.size(); ++k) {
    const Point d = grid.node(k) - c;
    const double r2 = d.x * d.x + d.y * d.y;
    if (values[k] >= level) {
      outer2 = std::max(outer2, r2);
    } else {
      inner2 = std::min(inner2, r2);
    }
  }
  // Every node strictly closer than the nearest sub-level node is covered.
  const double inner = std::isfinite(inner2) ? std::sqrt(inner2) : grid.half_nodes() * grid.h;
  return {inner, std::sqrt(outer2)};
}

void write_snapshot_csv(std::ostream& os, const Grid& grid, double t, std::span<const double> values) {
  os << "# t=" << t << ",h=" << grid.h << ",box=" << grid.half_width << "\n";
  os << "x,y,u\n";
  os.precision(17);
  for (std::size_t k = 0; k < values.size(); ++k) {
    const Point p = grid.node(k);
    os << p.x << "," << p.y << "," << values[k] << "\n";
  }
}

}  // namespace homog
