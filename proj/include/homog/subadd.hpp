#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "homog/grid.hpp"

namespace homog {

/// Two-index process X_{m,n}^t sampled from a seed.
struct TimedProcess {
  std::string name;
  std::function<double(Seed, double t, int m, int n)> sample;
  /// Optional: all X_{0,n}^0 for one seed in a single call (e.g. one PDE
  /// solve yields every radius).
  std::function<std::vector<double>(Seed, std::span<const int>)> sample_origin;
  double bound = 1.0;          // constant C of the bound X_{0,1}^0 <= C
  double delay_window = 0.0;   // s ranges over [C, C + delay_window]
  double tolerance = 0.0;      // slack for sampled inequalities
  double dependence_range = 0.0;
};

struct HypothesisCheck {
  std::string name;
  std::string status;  // "sampled" or "by construction"
  int instances = 0;
  int violations = 0;
  double worst_margin = 0.0;
  std::string reproduce;
};

struct ProcessReport {
  std::vector<HypothesisCheck> checks;
  bool ok() const;
  const HypothesisCheck* find(const std::string& name) const;
};

ProcessReport validate_process(const TimedProcess& p, int samples, Seed master = 0);

struct ConvergenceEstimate {
  std::vector<int> n_grid;
  std::vector<double> mean;
  std::vector<double> sd;
  std::vector<int> count;
  std::vector<double> half_width;
  double limit = 0.0;
  double limit_half_width = 0.0;
  bool one_sided_violation = false;
  bool half_width_decreasing = true;
  /// With shared seeds: mean of (X_{0,N} - X_{0,N/2}) / (N/2) at the top of
  /// the grid, which removes the O(1) start-up cost of the process.
  std::optional<double> increment;
  std::optional<double> increment_half_width;
};

struct EstimateOptions {
  /// Reuse one seed across the n-grid (required for the increment estimate).
  bool shared_seeds = false;
};

ConvergenceEstimate estimate_limit(const TimedProcess& p, std::span<const int> n_grid, int samples_per_n,
                                   Seed master = 0, const EstimateOptions& opt = {});

/// Compensated sum, independent of how the terms were produced.
double neumaier_sum(std::span<const double> v);

struct SampleStats {
  double mean = 0.0;
  double sd = 0.0;
  int count = 0;
};
SampleStats sample_stats(std::span<const double> v);

/// Additive process sum_{i=m}^{n-1} xi_i with xi_i iid uniform [lo, hi].
TimedProcess additive_uniform_process(double lo, double hi);
/// X_{m,n} = n - m.
TimedProcess deterministic_process();

}  // namespace homog
