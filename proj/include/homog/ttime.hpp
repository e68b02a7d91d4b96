#pragma once

#include <span>
#include <string>
#include <vector>

#include "homog/env.hpp"
#include "homog/geq.hpp"
#include "homog/pde.hpp"

namespace homog {

enum class FrontKind { Kpp, Geq };

struct TravelTimeRecord {
  double t0 = 0.0;
  Point x0{};
  Point x{};
  double tau = 0.0;
  FrontKind kind = FrontKind::Kpp;
  Seed seed = 0;
  std::string grid;
};

struct FrontOptions {
  double h = 0.1;
  double cfl_fraction = 0.9;
  ReactionSpec reaction{};
  /// Distance kept between the farthest target and the box edge, covering
  /// the exponentially small tail of the KPP front.
  double margin = 15.0;
  /// Extra box radius per unit of target distance, for anisotropic fronts.
  double box_slack = 0.3;
  /// Deadline factor on the a priori bound M_guess (|x - x0| + 1).
  double deadline_factor = 2.0;
  /// Front radii are recorded every `sample_every` time units (0: never).
  double sample_every = 0.0;
  /// Solve until this elapsed time even when every target is reached.
  double horizon = 0.0;
  /// Round dt down to a power of two so that grid-aligned shifts of the
  /// clock are exact in floating point.
  bool dyadic_dt = false;
};

struct FrontSample {
  double t = 0.0;
  double inner = 0.0;
  double outer = 0.0;
};

struct TravelRun {
  std::vector<TravelTimeRecord> records;
  std::vector<FrontSample> front;
  Grid grid;
};

/// A priori speed-type constant used for deadlines.
double m_guess(const EnvironmentSpec& spec);

/// One KPP solve from 1/2 chi_{B_1(x0)} at time t0 giving tau for every target.
TravelRun travel_times_kpp(const Environment& env, double t0, Point x0, std::span<const Point> targets,
                           const FrontOptions& opt);
TravelTimeRecord travel_time_kpp(const Environment& env, double t0, Point x0, Point x, const FrontOptions& opt);

/// Arrival times from one level-set solve: first time phi(x) >= -h.
TravelRun arrival_times_geq(const Environment& env, double t0, Point x0, std::span<const Point> targets,
                            const FrontOptions& opt);
TravelTimeRecord arrival_time_geq(const Environment& env, double t0, Point x0, Point x, const FrontOptions& opt);

TravelTimeRecord front_time(const Environment& env, double t0, Point x0, Point x, const FrontOptions& opt);

struct InequalityReport {
  std::string name;
  double lhs = 0.0;
  double rhs = 0.0;
  double tolerance = 0.0;
  std::string reproduce;

  double margin() const { return rhs + tolerance - lhs; }
  bool ok() const { return margin() >= 0.0; }
};

/// Grid tolerance 2 dt + 4 h M.
double inequality_tolerance(const Grid& grid, double m_emp);

InequalityReport check_subadditivity(const Environment& env, double t0, Point x0, Point z, Point x,
                                     const FrontOptions& opt, double m_emp);
InequalityReport check_restart_monotonicity(const Environment& env, double t0, Point x0, Point z, Point x,
                                            double t, const FrontOptions& opt, double m_emp);
InequalityReport check_lipschitz_in_target(const Environment& env, double t0, Point x0, Point x, Point z,
                                           const FrontOptions& opt, double m_emp);
InequalityReport check_linear_bound(const TravelTimeRecord& rec, double m_emp, double tolerance);

/// Checks B_{t/M}(x0) within and the outer radius within M t, at sampled
/// times t >= M. Tolerance is one grid cell.
struct SandwichCount {
  int samples = 0;
  int violations = 0;
  double worst_margin = 0.0;
};
SandwichCount check_ball_sandwich(std::span<const FrontSample> front, double m_emp, double h);

struct MCalibration {
  double m_emp = 0.0;
  double hair_trigger = 0.0;
  double outer_speed = 0.0;
  double inner_slowness = 0.0;
  int seeds = 0;
};

/// Runs `seeds` realizations from the origin up to `horizon` and sets
/// M = 1.5 * max(hair-trigger time, sup r_out / t, sup t / r_in).
MCalibration calibrate_m(const EnvironmentSpec& spec, const FrontOptions& opt, int seeds, double horizon,
                         Seed master);

}  // namespace homog
