#pragma once

#include <functional>
#include <iosfwd>
#include <optional>
#include <vector>

#include "homog/env.hpp"
#include "homog/grid.hpp"

namespace homog {

/// Grid function u(t, .) for the KPP equation started at environment time t0.
struct SolutionField {
  Grid grid;
  Environment env;
  double t0 = 0.0;
  double time = 0.0;  // elapsed since t0
  std::vector<double> u;

  double absolute_time() const { return t0 + time; }
};

/// Explicit step bound dt * (2 d Lambda / h^2 + sum |b_i| / h + g_max) <= 1.
double kpp_stable_dt(const EnvironmentSpec& spec, double h);

Grid make_kpp_grid(const EnvironmentSpec& spec, double h, double half_width, Point center = {},
                   double cfl_fraction = 0.9);

/// Speed bound from the exponential supersolution: 2 sqrt(Lambda g_max) + b_max.
double kpp_speed_bound(const EnvironmentSpec& spec);

SolutionField init_ball_datum(const Grid& grid, Environment env, Point center, double height = 0.5,
                              double t0 = 0.0, double radius = 1.0);

/// Monotone explicit solver; owns the field cache so repeated steps only
/// resample the environment once per time cell.
class KppSolver {
 public:
  using Observer = std::function<bool(const SolutionField&)>;

  KppSolver(Environment env, ReactionSpec reaction, const Grid& grid);

  /// One step of length dt <= grid.dt.
  void step(SolutionField& sol, double dt);
  void step(SolutionField& sol) { step(sol, grid_.dt); }

  /// Steps to elapsed time T (last step shortened). The observer runs after
  /// every step; returning false stops early.
  void solve_until(SolutionField& sol, double T, const Observer& observer = {});

  void set_boundary_guard(std::optional<double> level) { guard_ = level; }

 private:
  Environment env_;
  ReactionSpec reaction_;
  Grid grid_;
  FieldSampler sampler_;
  std::vector<double> next_;
  std::optional<double> guard_ = 1e-6;
};

SolutionField step(SolutionField sol, const ReactionSpec& reaction);
SolutionField solve_until(SolutionField sol, const ReactionSpec& reaction, double T);

RegionMask superlevel_set(const SolutionField& sol, double level);

/// Largest radius r with every node of B_r(c) at or above `level`, and the
/// farthest node at or above it.
struct FrontRadii {
  double inner = 0.0;
  double outer = 0.0;
};
FrontRadii front_radii(const Grid& grid, std::span<const double> values, double level, Point c);

/// CSV snapshot: a "# t=..,h=..,box=.." header line then x,y,u rows.
void write_snapshot_csv(std::ostream& os, const Grid& grid, double t, std::span<const double> values);

}  // namespace homog
