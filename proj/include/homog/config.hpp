#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "homog/env.hpp"
#include "homog/geometry.hpp"
#include "homog/ttime.hpp"

namespace homog {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class ExperimentKind { ValidateEnv, SpeedTable, WulffShape, SubaddSynthetic, Sandwich, GeqLimit, FullPipeline };

std::string to_string(ExperimentKind k);
ExperimentKind parse_kind(const std::string& s);
std::vector<std::string> experiment_kinds();

struct SolverBlock {
  double h = 0.1;
  double cfl_fraction = 0.9;
  double margin = 15.0;
  double box_slack = 0.3;
};

struct CalibrationBlock {
  int seeds = 50;
  double horizon = 12.0;
  double sample_every = 0.25;
};

struct SpeedTableBlock {
  int directions = 32;
  double radius = 40.0;
  int samples = 4;
  bool increment = true;
};

struct ScaledBlock {
  std::string initial = "disk";  // disk or square
  double initial_radius = 1.0;   // disk radius or square half-side
  double height = 1.0;
  double rho_scale = 1.0;
  double rho_power = 1.0;
  double shift = 1.0;
  std::vector<double> epsilons{0.25, 0.125, 0.0625, 0.03125};
  double delta = 0.25;
  double level = 0.5;
  std::vector<double> times{0.5, 1.0, 2.0};
  int seeds = 50;
  double solver_h = 0.5;
  std::vector<double> required_pass{};  // per eps, empty: not asserted
  double probe_tolerance = 0.1;
  double required_seed_fraction = 0.9;
  double probe_radius = 3.0;
};

struct SubaddBlock {
  double lo = 1.0;
  double hi = 2.0;
  std::vector<int> n_grid{8, 32, 128};
  int samples = 200;
};

struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::ValidateEnv;
  std::uint64_t seed = 0;
  int workers = 1;
  std::string output = "out";
  EnvironmentSpec environment{};
  ReactionSpec reaction{};
  SolverBlock solver{};
  CalibrationBlock calibration{};
  SpeedTableBlock speed_table{};
  ScaledBlock scaled{};
  SubaddBlock subadd{};
  int flow_samples = 100;

  FrontOptions front_options() const;
};

/// Strict parse: unknown keys and out-of-range values raise ConfigError
/// naming the field. Hypothesis checks are left to validation.
ExperimentConfig parse_config_text(const std::string& text);
ExperimentConfig parse_config(const std::string& path);

/// Canonical YAML with every field, in fixed order.
std::string emit_config(const ExperimentConfig& cfg);
std::string emit_defaults(ExperimentKind kind);

/// FNV-1a 64 of the canonical text, as 16 hex digits.
std::string config_hash(const ExperimentConfig& cfg);

}  // namespace homog
