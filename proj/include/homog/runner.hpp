#pragma once

#include <atomic>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "homog/config.hpp"
#include "homog/env.hpp"
#include "homog/homog.hpp"
#include "homog/wulff.hpp"

namespace homog {

enum ExitCode : int { exit_pass = 0, exit_assertion = 1, exit_config = 2, exit_anomaly = 3 };

struct RunOverrides {
  std::optional<Seed> seed;
  std::optional<int> workers;
  std::optional<std::string> out;
};

/// Applies command-line overrides; the result is what gets hashed.
ExperimentConfig apply_overrides(ExperimentConfig cfg, const RunOverrides& o);

struct CheckLine {
  std::string name;
  double value = 0.0;
  double threshold = 0.0;
  bool pass = true;
  std::string reproduce;
};

struct RunResult {
  int exit_code = exit_pass;
  std::vector<CheckLine> checks;
  std::vector<std::string> artifacts;
  std::string message;
};

/// Runs the pipeline for cfg.kind, writing ledger.jsonl, summary.csv and the
/// kind's data CSVs under cfg.output. `source` is the config path quoted in
/// reproduction lines.
RunResult run_experiment(const ExperimentConfig& cfg, const std::string& source, std::ostream& log);

/// Hypothesis report for the configured environment and reaction.
ValidationReport validate_config(const ExperimentConfig& cfg);

/// Evaluates fn(0..n-1) on `workers` threads; results are returned by index,
/// so the output does not depend on scheduling.
template <class T>
std::vector<T> parallel_map(std::size_t n, int workers, const std::function<T(std::size_t)>& fn) {
  std::vector<T> out(n);
  if (workers <= 1 || n <= 1) {
    for (std::size_t i = 0; i < n; ++i) out[i] = fn(i);
    return out;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::atomic<bool> failed{false};
  auto body = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= n || failed.load()) return;
      try {
        out[i] = fn(i);
      } catch (...) {
        if (!failed.exchange(true)) error = std::current_exception();
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  const std::size_t count = std::min<std::size_t>(static_cast<std::size_t>(workers), n);
  for (std::size_t k = 0; k < count; ++k) pool.emplace_back(body);
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
  return out;
}

/// Scaled-experiment block turned into the homog module's type.
ScaledExperiment make_scaled_experiment(const ExperimentConfig& cfg, const WulffShape& shape);

/// Number formatting used in every CSV (%.12g).
std::string csv_number(double v);

}  // namespace homog
