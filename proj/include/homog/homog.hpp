#pragma once

#include <functional>
#include <variant>
#include <vector>

#include "homog/env.hpp"
#include "homog/geometry.hpp"
#include "homog/pde.hpp"
#include "homog/ttime.hpp"
#include "homog/wulff.hpp"

namespace homog {

using InitialSet = std::variant<Disk, ConvexPolygon>;

double signed_distance(const InitialSet& g, Point x);
double set_radius(const InitialSet& g);

/// Signed distance to G + tS (S taken as the hull of the shape).
double signed_distance_sum(const InitialSet& g, double t, const WulffShape& shape, Point x);

struct ScaledExperiment {
  WulffShape shape;
  InitialSet initial = Disk{};
  /// Height of the KPP datum.
  double height = 1.0;
  /// Datum erosion rho(eps) = rho_scale * eps^rho_power (rho_scale 0 disables).
  double rho_scale = 1.0;
  double rho_power = 1.0;
  /// y_eps alternates between +shift/2 e1 and -shift/2 e1 along the eps list.
  double shift = 1.0;
  std::vector<double> epsilons{0.25, 0.125, 0.0625, 0.03125};
  double delta = 0.25;
  double level = 0.5;
  std::vector<double> times{0.5, 1.0, 2.0};
  int seeds = 50;
  Seed master = 0;
  FrontOptions front{};
  /// G-equation initial profile and its modulus of continuity.
  std::function<double(Point)> profile;
  std::function<double(double)> modulus;

  double rho(double eps) const;
  Point offset(double eps) const;
  void check() const;
};

/// Unscaled solve; values are read back in scaled coordinates
/// x_s = eps X - y_eps at scaled times t = eps T.
struct ScaledRun {
  double eps = 1.0;
  Point offset{};
  Grid grid;
  std::vector<double> times;
  std::vector<std::vector<double>> values;

  Point scaled(std::size_t node) const { return eps * grid.node(node) - offset; }
  double value_at(std::size_t snapshot, Point x_scaled) const;
};

ScaledRun scaled_solve_kpp(const ScaledExperiment& exp, const EnvironmentSpec& spec, double eps, Seed seed,
                           std::vector<double> times);
ScaledRun scaled_solve_geq(const ScaledExperiment& exp, const EnvironmentSpec& spec, double eps, Seed seed,
                           std::vector<double> times);

struct SandwichResult {
  double eps = 0.0;
  double t = 0.0;
  Seed seed = 0;
  bool inner = false;
  bool outer = false;
  double inner_margin = 0.0;
  double outer_margin = 0.0;
  bool pass() const { return inner && outer; }
};

SandwichResult sandwich_check(const ScaledExperiment& exp, const ScaledRun& run, std::size_t snapshot, Seed seed);
/// All configured times from one solve.
std::vector<SandwichResult> sandwich_run(const ScaledExperiment& exp, const EnvironmentSpec& spec, double eps,
                                         Seed seed);

struct Probe {
  double t = 0.0;
  Point x{};
};

struct ProbeOutcome {
  Probe probe;
  double value = 0.0;
  double expected = 0.0;
  double error = 0.0;
  double allowed = 0.0;
  bool checked = false;
  bool ok = true;
};

struct ProbeReport {
  std::vector<ProbeOutcome> outcomes;
  double max_error = 0.0;
  int failures = 0;
  bool ok() const { return failures == 0; }
};

/// Inside G + tS eroded by `clearance` expect u >= 1 - tol; outside the
/// dilation expect u <= tol; probes in between are skipped.
ProbeReport pointwise_limit_check(const ScaledExperiment& exp, const EnvironmentSpec& spec, double eps, Seed seed,
                                  const std::vector<Probe>& probes, double clearance, double tol);

/// sup of the profile over x - tS, sampling tS with the given spacing.
double dilation_limit(const std::function<double(Point)>& u0, const WulffShape& shape, double t, Point x,
                      double spacing = 0.02);

ProbeReport geq_limit_check(const ScaledExperiment& exp, const EnvironmentSpec& spec, double eps, Seed seed,
                            const std::vector<Probe>& probes, double tol);

std::vector<Probe> default_probes(const std::vector<double>& times, double radius, int rings, int angles);

struct Proportion {
  int passes = 0;
  int trials = 0;
  double fraction() const { return trials ? double(passes) / trials : 0.0; }
};

struct Interval {
  double lo = 0.0;
  double hi = 1.0;
};
Interval wilson_interval(const Proportion& p, double z = 1.96);

/// Pass fraction at each smaller eps stays above the Wilson lower bound of
/// the preceding one.
bool non_decreasing_within_wilson(const std::vector<Proportion>& by_eps, double z = 1.96);

/// (1 - |x|^2/4)^2 on |x| < 2, zero outside.
double bump_profile(Point x);
double bump_modulus(double r);

}  // namespace homog
