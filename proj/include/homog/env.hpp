#pragma once

#include <array>
#include <cstdint>
#include <initializer_list>
#include <memory>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "homog/grid.hpp"

namespace homog {

enum class EnvMode { Kpp, Geq };

struct EnvironmentSpec {
  int dim = 2;
  EnvMode mode = EnvMode::Kpp;
  double cell_duration = 1.0;
  double cell_size = 1.0;
  double mollifier_radius = 0.25;

  // KPP ranges
  double ellipticity = 1.0;    // lower end of the diffusion range
  double diffusion_max = 1.0;  // upper end
  double drift_max = 0.0;      // bound on |b|
  double growth_min = 1.0;     // range of f_u(t,x,0)
  double growth_max = 1.0;

  // G-equation ranges
  double flame_min = 1.0;
  double flame_max = 1.0;
  double stream_amplitude = 0.0;
  Point mean_flow{};  // constant flow added to the stream-function flow

  Seed seed = 0;

  /// Throws InvalidSpec naming the first failed invariant.
  void check() const;

  double drift_component_max() const;
  /// Upper bound on |v| over space-time.
  double flow_max() const;
  /// Lipschitz bounds in x for the flow and flame-speed fields.
  double flow_lipschitz() const;
  double flame_lipschitz() const;
};

enum class ReactionForm { Logistic, PiecewiseLinear };

struct ReactionSpec {
  ReactionForm form = ReactionForm::Logistic;

  double value(double growth, double u) const {
    return form == ReactionForm::Logistic ? growth * u * (1.0 - u)
                                          : growth * (u < 1.0 - u ? u : 1.0 - u);
  }
  /// Environment-free lower bound f_0(u).
  double lower_bound(double growth_min, double u) const { return value(growth_min, u); }
  /// Modulus bounding g - f(u)/u.
  double gap_modulus(double growth_max, double u) const;
};

std::string to_string(EnvMode m);
std::string to_string(ReactionForm f);

struct KppCoefficients {
  std::array<double, 2> diffusion{};  // diagonal of A
  Point drift{};
  double growth = 0.0;
};

struct GeqCoefficients {
  double flame = 0.0;
  Point flow{};
  double stream = 0.0;
};

using Coefficients = std::variant<KppCoefficients, GeqCoefficients>;

enum class Field : std::uint8_t { DiffusionX, DiffusionY, DriftX, DriftY, Growth, Flame, Stream };
inline constexpr int field_count = 7;

/// Records the time-cell indices an evaluation touched.
struct CellTrace {
  std::vector<std::int64_t> time_cells;
};

/// One mollifier axis: value = lerp(V[index], V[index + 1], w).
struct AxisWeight {
  std::int64_t index = 0;
  double w = 0.0;
  double dw = 0.0;  // derivative of w along the axis
};

AxisWeight axis_weight(double s, double cell, double radius);

/// Seed for one cell of an experiment, hash(master, coordinates); adding
/// cells never perturbs existing ones.
Seed derive_seed(Seed master, std::initializer_list<std::int64_t> coords);

/// Uniform [0, 1) value of a hashed stream position.
double hashed_unit(Seed seed, std::uint64_t position);

/// Immutable sampled environment. Copies share the underlying lattice; a
/// shift only changes the stored offset, so shifted copies are cheap.
class Environment {
 public:
  Environment() = default;

  const EnvironmentSpec& spec() const { return *spec_; }
  Seed seed() const { return seed_; }
  double time_offset() const { return shift_t_; }
  Point space_offset() const { return shift_x_; }

  KppCoefficients kpp(double t, Point x, CellTrace* trace = nullptr) const;
  GeqCoefficients geq(double t, Point x, CellTrace* trace = nullptr) const;
  double field(Field f, double t, Point x, CellTrace* trace = nullptr) const;

  /// Unmollified value of one lattice cell.
  double cell_value(Field f, std::int64_t m, std::int64_t i, std::int64_t j) const;

  /// Absolute lattice coordinates of the point (t, x).
  double lattice_time(double t) const { return (t + shift_t_) + phase_t_; }
  double lattice_x(double x) const { return (x + shift_x_.x) + phase_x_.x; }
  double lattice_y(double y) const { return (y + shift_x_.y) + phase_x_.y; }

  /// Mollified plane of field f in time cell m at the lattice position.
  double plane(Field f, std::int64_t m, const AxisWeight& ax, const AxisWeight& ay) const;

  friend Environment build_environment(const EnvironmentSpec& spec, Seed seed);
  friend Environment shift(const Environment& env, double s, Point y);

 private:
  double field_range_lo(Field f) const;
  double field_range_hi(Field f) const;
  double clamp_field(Field f, double v) const;

  std::shared_ptr<const EnvironmentSpec> spec_;
  Seed seed_ = 0;
  double phase_t_ = 0.0;
  Point phase_x_{};
  double shift_t_ = 0.0;
  Point shift_x_{};

  friend class FieldSampler;
};

Environment build_environment(const EnvironmentSpec& spec, Seed seed);
inline Environment build_environment(const EnvironmentSpec& spec) { return build_environment(spec, spec.seed); }

Coefficients evaluate(const Environment& env, double t, Point x);

/// evaluate(shift(env, s, y), t, x) == evaluate(env, t + s, x + y) bitwise.
Environment shift(const Environment& env, double s, Point y);

double temporal_dependence_range(const EnvironmentSpec& spec);

struct HypothesisResult {
  std::string name;
  bool pass = false;
  double margin = 0.0;
  std::string detail;
};

struct ValidationReport {
  std::vector<HypothesisResult> items;

  bool ok() const;
  const HypothesisResult* first_failure() const;
  const HypothesisResult* find(const std::string& name) const;
  std::string to_text() const;
};

ValidationReport validate_hypotheses(const EnvironmentSpec& spec, const ReactionSpec& reaction,
                                     int flow_samples = 100);

/// Samples environment fields on the nodes of a grid padded by `ghost`
/// nodes per side. Spatial slabs are cached per time cell and blended in
/// time, giving results bitwise equal to Environment::field at the nodes.
class FieldSampler {
 public:
  FieldSampler(Environment env, const Grid& grid, int ghost, std::vector<Field> fields);

  /// Field values at environment time t; valid until the next call.
  std::span<const double> at(Field f, double t);

  int ghost() const { return ghost_; }
  int stride() const { return nx_; }
  int rows() const { return ny_; }

 private:
  struct Slab {
    std::int64_t m = 0;
    std::vector<std::vector<double>> raw;
    std::vector<std::vector<double>> clamped;
  };

  const Slab& slab(std::int64_t m);
  int slot(Field f) const;

  Environment env_;
  int ghost_ = 0;
  int nx_ = 0;
  int ny_ = 0;
  std::vector<Field> fields_;
  std::vector<AxisWeight> wx_;
  std::vector<AxisWeight> wy_;
  std::vector<double> lo_;
  std::vector<double> hi_;
  std::vector<Slab> cache_;
  std::vector<std::vector<double>> blended_;
};

}  // namespace homog
