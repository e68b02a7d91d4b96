#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "homog/env.hpp"
#include "homog/grid.hpp"

namespace homog {

/// Level function for u_t + v.grad u = c |grad u| started at time t0.
struct LevelFunction {
  Grid grid;
  Environment env;
  double t0 = 0.0;
  double time = 0.0;
  std::vector<double> phi;

  double absolute_time() const { return t0 + time; }
};

struct ReachableSet {
  RegionMask mask;
  double time = 0.0;
  double t0 = 0.0;
  Point origin{};
};

/// Largest foot displacement of one step, in cells.
inline constexpr double geq_max_cells = 4.0;

/// dt * (v_max + c_max) <= geq_max_cells * h.
double geq_step_dt(const EnvironmentSpec& spec, double h);
Grid make_geq_grid(const EnvironmentSpec& spec, double h, double half_width, Point center = {},
                   double cfl_fraction = 0.9);

/// phi_0(y) = -|y - x0| clamped at -half_width.
LevelFunction distance_datum(const Grid& grid, Environment env, Point x0, double t0 = 0.0);
LevelFunction sample_datum(const Grid& grid, Environment env, const std::function<double(Point)>& u0,
                           double t0 = 0.0);

/// Monotone semi-Lagrangian step: phi(x) <- max over controls a of the
/// bilinear interpolant of phi at x - dt (v + c a), fields taken at the
/// step midpoint. Ordered data stay ordered and constants stay constant.
class HjSolver {
 public:
  using Observer = std::function<bool(const LevelFunction&)>;

  HjSolver(Environment env, const Grid& grid, int n_controls = 32);

  void step(LevelFunction& lf, double dt);
  void step(LevelFunction& lf) { step(lf, grid_.dt); }
  void solve_until(LevelFunction& lf, double T, const Observer& observer = {});

  /// Flow field on the grid at environment time t, the discrete curl of the
  /// stream function plus the mean flow; layout matches LevelFunction::phi.
  void flow_at(double t, std::vector<double>& vx, std::vector<double>& vy);

 private:
  Environment env_;
  Grid grid_;
  FieldSampler flame_;
  std::optional<FieldSampler> stream_;
  std::vector<Point> controls_;
  std::vector<double> vx_, vy_, next_;
};

LevelFunction hj_step(LevelFunction lf);

ReachableSet reachable_set(const Environment& env, double t0, Point x0, double t, const Grid& grid);

/// Mask {phi >= -h}.
RegionMask reached_mask(const LevelFunction& lf);

/// Control direction set: n unit vectors spread on the circle (on {+1,-1}
/// in one dimension) plus the zero control.
std::vector<Point> control_set(int dim, int n_controls);

/// Frontier propagation of gamma' = v + c alpha with Euler steps, one
/// continuous representative per grid cell.
RegionMask control_oracle(const Environment& env, double t0, Point x0, double t, int n_steps, int n_controls,
                          const Grid& grid);

/// Same propagation seeded from every node, carrying the datum value and
/// keeping the maximum per cell: the sup over reachable origins.
LevelFunction control_solution(const Environment& env, const std::function<double(Point)>& u0, double t0,
                               double t, int n_steps, int n_controls, const Grid& grid);

/// RK4 path for gamma' = v + c alpha(s) with a piecewise-constant control.
Point integrate_path(const Environment& env, double t_start, Point start, std::span<const Point> controls,
                     double duration, int substeps, bool backward = false);

struct PathStabilityResult {
  double origin_gap = 0.0;
  double bound = 0.0;
  double rate = 0.0;  // C = v_max + Lip(v) + Lip(c)
  bool ok() const { return origin_gap <= bound; }
};

/// Backward-integrates from (t0 + t, x) and (t0 + t', x + dx) under one control
/// sequence and compares the origins against exp(C t)(|dx| + C |t - t'|).
PathStabilityResult path_stability(const Environment& env, double t0, Point x, Point dx, double t,
                                   double dt_shift, std::span<const Point> controls, int substeps);

}  // namespace homog
