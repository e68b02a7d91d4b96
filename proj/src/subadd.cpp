#include "homog/subadd.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "homog/env.hpp"

namespace homog {

double neumaier_sum(std::span<const double> v) {
  double sum = 0.0;
  double comp = 0.0;
  for (double x : v) {
    const double t = sum + x;
    if (std::abs(sum) >= std::abs(x)) {
      comp += (sum - t) + x;
    } else {
      comp += (x - t) + sum;
    }
    sum = t;
  }
  return sum + comp;
}

SampleStats sample_stats(std::span<const double> v) {
  SampleStats s;
  s.count = static_cast<int>(v.size());
  if (v.empty()) return s;
  s.mean = neumaier_sum(v) / v.size();
  if (v.size() < 2) return s;
  std::vector<double> dev(v.size());
  for (std::size_t k = 0; k < v.size(); ++k) dev[k] = (v[k] - s.mean) * (v[k] - s.mean);
  s.sd = std::sqrt(neumaier_sum(dev) / (v.size() - 1));
  return s;
}

bool ProcessReport::ok() const {
  return std::all_of(checks.begin(), checks.end(), [](const auto& c) { return c.violations == 0; });
}

const HypothesisCheck* ProcessReport::find(const std::string& name) const {
  for (const auto& c : checks)
    if (c.name == name) return &c;
  return nullptr;
}

namespace {

void note(HypothesisCheck& c, double margin, const std::string& repro) {
  ++c.instances;
  if (c.instances == 1 || margin < c.worst_margin) c.worst_margin = margin;
  if (margin < 0.0) {
    if (c.violations == 0) c.reproduce = repro;
    ++c.violations;
  }
}

}  // namespace

ProcessReport validate_process(const TimedProcess& p, int samples, Seed master) {
  HypothesisCheck subadd{"subadditivity", "sampled", 0, 0, 0.0, {}};
  HypothesisCheck bound{"bounded_step", "sampled", 0, 0, 0.0, {}};
  HypothesisCheck delay{"delay_monotonicity", "sampled", 0, 0, 0.0, {}};
  for (int k = 0; k < samples; ++k) {
    const Seed seed = derive_seed(master, {k});
    const Seed pick = derive_seed(master, {k, 1});
    const double t = 10.0 * hashed_unit(pick, 0);
    const int m = static_cast<int>(4 * hashed_unit(pick, 1));
    const int kk = m + 1 + static_cast<int>(4 * hashed_unit(pick, 2));
    const int n = kk + 1 + static_cast<int>(4 * hashed_unit(pick, 3));

    std::ostringstream repro;
    repro.precision(17);
    repro << p.name << " seed=" << seed << " t=" << t << " m=" << m << " k=" << kk << " n=" << n;

    const double xmk = p.sample(seed, t, m, kk);
    const double lhs = p.sample(seed, t, m, n);
    const double rhs = xmk + p.sample(seed, t + xmk, kk, n);
    note(subadd, rhs + p.tolerance - lhs, repro.str());

    const double x01 = p.sample(seed, 0.0, 0, 1);
    note(bound, p.bound + p.tolerance - x01, p.name + " seed=" + std::to_string(seed));

    const double s = p.bound + p.delay_window * hashed_unit(pick, 4);
    const double delayed = p.sample(seed, t + s, m, n);
    std::ostringstream r2;
    r2.precision(17);
    r2 << repro.str() << " s=" << s;
    note(delay, delayed + s + p.tolerance - lhs, r2.str());
  }
  ProcessReport rep;
  rep.checks = {subadd, bound, delay};
  std::ostringstream dep;
  dep << "temporal dependence range " << p.dependence_range;
  rep.checks.push_back({"stationarity", "by construction", 0, 0, 0.0, "space-time stationary environment"});
  rep.checks.push_back({"adaptedness", "by construction", 0, 0, 0.0, "values depend on the environment up to the arrival time"});
  rep.checks.push_back({"mixing", "by construction", 0, 0, 0.0, dep.str()});
  return rep;
}

ConvergenceEstimate estimate_limit(const TimedProcess& p, std::span<const int> n_grid, int samples_per_n,
                                   Seed master, const EstimateOptions& opt) {
  if (n_grid.size() < 2) throw InvalidSpec("n-grid needs at least two entries");
  if (!std::is_sorted(n_grid.begin(), n_grid.end()) ||
      std::adjacent_find(n_grid.begin(), n_grid.end()) != n_grid.end())
    throw InvalidSpec("n-grid must be increasing");

  ConvergenceEstimate est;
  est.n_grid.assign(n_grid.begin(), n_grid.end());
  const std::size_t G = n_grid.size();
  std::vector<std::vector<double>> values(G, std::vector<double>(samples_per_n));

  for (int s = 0; s < samples_per_n; ++s) {
    if (opt.shared_seeds) {
      const Seed seed = derive_seed(master, {s});
      std::vector<double> x;
      if (p.sample_origin) {
        x = p.sample_origin(seed, n_grid);
      } else {
        for (int n : n_grid) x.push_back(p.sample(seed, 0.0, 0, n));
      }
      for (std::size_t g = 0; g < G; ++g) values[g][s] = x[g];
    } else {
      for (std::size_t g = 0; g < G; ++g) {
        const Seed seed = derive_seed(master, {static_cast<std::int64_t>(g), s});
        const int n = n_grid[g];
        values[g][s] = p.sample_origin ? p.sample_origin(seed, std::span<const int>(&n, 1)).front()
                                       : p.sample(seed, 0.0, 0, n);
      }
    }
  }

  for (std::size_t g = 0; g < G; ++g) {
    std::vector<double> scaled(samples_per_n);
    for (int s = 0; s < samples_per_n; ++s) scaled[s] = values[g][s] / n_grid[g];
    const SampleStats st = sample_stats(scaled);
    est.mean.push_back(st.mean);
    est.sd.push_back(st.sd);
    est.count.push_back(st.count);
    est.half_width.push_back(st.count > 0 ? 1.96 * st.sd / std::sqrt(double(st.count)) : 0.0);
  }
  est.limit = est.mean.back();
  est.limit_half_width = est.half_width.back();
  for (std::size_t g = 0; g < G; ++g) {
    if (est.mean[g] < est.limit - est.limit_half_width) est.one_sided_violation = true;
    if (g > 0 && est.half_width[g] > est.half_width[g - 1]) est.half_width_decreasing = false;
  }

  if (opt.shared_seeds) {
    const int top = n_grid[G - 1];
    const auto half = std::find(n_grid.begin(), n_grid.end(), top / 2);
    if (top % 2 == 0 && half != n_grid.end()) {
      const std::size_t h = static_cast<std::size_t>(half - n_grid.begin());
      std::vector<double> inc(samples_per_n);
      for (int s = 0; s < samples_per_n; ++s) inc[s] = (values[G - 1][s] - values[h][s]) / (top - top / 2);
      const SampleStats st = sample_stats(inc);
      est.increment = st.mean;
      est.increment_half_width = st.count > 0 ? 1.96 * st.sd / std::sqrt(double(st.count)) : 0.0;
    }
  }
  return est;
}

TimedProcess additive_uniform_process(double lo, double hi) {
  TimedProcess p;
  p.name = "additive_uniform";
  p.sample = [lo, hi](Seed seed, double, int m, int n) {
    std::vector<double> xi;
    for (int i = m; i < n; ++i) xi.push_back(lo + (hi - lo) * hashed_unit(seed, static_cast<std::uint64_t>(i)));
    return neumaier_sum(xi);
  };
  p.bound = hi;
  p.delay_window = hi;
  p.tolerance = 1e-12;
  return p;
}

TimedProcess deterministic_process() {
  TimedProcess p;
  p.name = "deterministic";
  p.sample = [](Seed, double, int m, int n) { return static_cast<double>(n - m); };
  p.bound = 1.0;
  p.delay_window = 1.0;
  return p;
}

}  // namespace homog
