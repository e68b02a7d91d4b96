#include "homog/config.hpp"

#include <yaml-cpp/yaml.h>

#include <charconv>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

namespace homog {

namespace {

const std::vector<std::pair<ExperimentKind, std::string>> kind_names = {
    {ExperimentKind::ValidateEnv, "validate_env"},   {ExperimentKind::SpeedTable, "speed_table"},
    {ExperimentKind::WulffShape, "wulff_shape"},     {ExperimentKind::SubaddSynthetic, "subadd_synthetic"},
    {ExperimentKind::Sandwich, "sandwich"},          {ExperimentKind::GeqLimit, "geq_limit"},
    {ExperimentKind::FullPipeline, "full_pipeline"},
};

class Section {
 public:
  Section(YAML::Node node, std::string path) : node_(std::move(node)), path_(std::move(path)) {
    if (node_ && !node_.IsNull() && !node_.IsMap()) throw ConfigError(path_ + ": expected a mapping");
  }

  bool present() const { return node_ && node_.IsMap(); }

  template <class T>
  void get(const std::string& key, T& out) {
    seen_.insert(key);
    if (!present() || !node_[key]) return;
    try {
      out = node_[key].template as<T>();
    } catch (const YAML::Exception&) {
      throw ConfigError(name(key) + ": wrong type");
    }
  }

  Section child(const std::string& key) {
    seen_.insert(key);
    return Section(present() ? node_[key] : YAML::Node(), name(key));
  }

  YAML::Node raw(const std::string& key) {
    seen_.insert(key);
    return present() ? node_[key] : YAML::Node();
  }

  std::string name(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

  void finish() const {
    if (!present()) return;
    for (const auto& kv : node_) {
      const auto key = kv.first.as<std::string>();
      if (!seen_.count(key)) throw ConfigError("unknown key '" + name(key) + "'");
    }
  }

 private:
  YAML::Node node_;
  std::string path_;
  std::set<std::string> seen_;
};

void require(bool cond, const std::string& field, const std::string& what) {
  if (!cond) throw ConfigError(field + " " + what);
}

void parse_environment(Section s, EnvironmentSpec& e) {
  std::string mode = to_string(e.mode);
  s.get("dim", e.dim);
  s.get("mode", mode);
  s.get("cell_duration", e.cell_duration);
  s.get("cell_size", e.cell_size);
  s.get("mollifier_radius", e.mollifier_radius);
  s.get("ellipticity", e.ellipticity);
  s.get("diffusion_max", e.diffusion_max);
  s.get("drift_max", e.drift_max);
  s.get("growth_min", e.growth_min);
  s.get("growth_max", e.growth_max);
  s.get("flame_min", e.flame_min);
  s.get("flame_max", e.flame_max);
  s.get("stream_amplitude", e.stream_amplitude);
  std::vector<double> flow{e.mean_flow.x, e.mean_flow.y};
  s.get("mean_flow", flow);
  s.finish();

  const std::string p = "environment.";
  if (mode == "kpp") {
    e.mode = EnvMode::Kpp;
  } else if (mode == "geq") {
    e.mode = EnvMode::Geq;
  } else {
    throw ConfigError(p + "mode must be kpp or geq");
  }
  require(flow.size() == 2, p + "mean_flow", "must have two entries");
  e.mean_flow = {flow[0], flow[1]};
  require(e.dim == 1 || e.dim == 2, p + "dim", "must be 1 or 2");
  require(e.cell_duration > 0, p + "cell_duration", "must be positive");
  require(e.cell_size > 0, p + "cell_size", "must be positive");
  require(e.mollifier_radius >= 0, p + "mollifier_radius", "must be nonnegative");
  require(e.mollifier_radius <= 0.5 * std::min(e.cell_duration, e.cell_size), p + "mollifier_radius",
          "must not exceed half a cell");
  require(e.ellipticity > 0, p + "ellipticity", "must be positive");
  require(e.diffusion_max >= e.ellipticity, p + "diffusion_max", "must be >= ellipticity");
  require(e.drift_max >= 0, p + "drift_max", "must be nonnegative");
  require(e.growth_min > 0, p + "growth_min", "must be positive");
  require(e.growth_max >= e.growth_min, p + "growth_max", "must be >= growth_min");
  require(e.flame_min > 0, p + "flame_min", "must be positive");
  require(e.flame_max >= e.flame_min, p + "flame_max", "must be >= flame_min");
  require(e.stream_amplitude >= 0, p + "stream_amplitude", "must be nonnegative");
}

}  // namespace

std::string to_string(ExperimentKind k) {
  for (const auto& [kind, name] : kind_names)
    if (kind == k) return name;
  return "unknown";
}

ExperimentKind parse_kind(const std::string& s) {
  for (const auto& [kind, name] : kind_names)
    if (name == s) return kind;
  throw ConfigError("kind '" + s + "' is not one of validate_env, speed_table, wulff_shape, subadd_synthetic, "
                    "sandwich, geq_limit, full_pipeline");
}

std::vector<std::string> experiment_kinds() {
  std::vector<std::string> out;
  for (const auto& kv : kind_names) out.push_back(kv.second);
  return out;
}

FrontOptions ExperimentConfig::front_options() const {
  FrontOptions o;
  o.h = solver.h;
  o.cfl_fraction = solver.cfl_fraction;
  o.margin = solver.margin;
  o.box_slack = solver.box_slack;
  o.reaction = reaction;
  return o;
}

ExperimentConfig parse_config_text(const std::string& text) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::Exception& e) {
    throw ConfigError(std::string("malformed configuration: ") + e.what());
  }
  if (!root.IsMap()) throw ConfigError("configuration must be a mapping");
  Section top(root, "");
  ExperimentConfig c;

  std::string kind;
  top.get("kind", kind);
  if (kind.empty()) throw ConfigError("kind is required");
  c.kind = parse_kind(kind);
  if (!root["seed"]) throw ConfigError("seed is required");
  top.get("seed", c.seed);
  top.get("workers", c.workers);
  top.get("output", c.output);
  require(c.workers >= 1, "workers", "must be at least 1");

  parse_environment(top.child("environment"), c.environment);

  {
    Section s = top.child("reaction");
    std::string form = to_string(c.reaction.form);
    s.get("form", form);
    s.finish();
    if (form == "logistic") {
      c.reaction.form = ReactionForm::Logistic;
    } else if (form == "piecewise_linear") {
      c.reaction.form = ReactionForm::PiecewiseLinear;
    } else {
      throw ConfigError("reaction.form must be logistic or piecewise_linear");
    }
  }
  {
    Section s = top.child("solver");
    s.get("h", c.solver.h);
    s.get("cfl_fraction", c.solver.cfl_fraction);
    s.get("margin", c.solver.margin);
    s.get("box_slack", c.solver.box_slack);
    s.finish();
    require(c.solver.h > 0, "solver.h", "must be positive");
    require(c.solver.cfl_fraction > 0 && c.solver.cfl_fraction <= 1, "solver.cfl_fraction", "must lie in (0, 1]");
    require(c.solver.margin >= 0, "solver.margin", "must be nonnegative");
    require(c.solver.box_slack >= 0, "solver.box_slack", "must be nonnegative");
  }
  {
    Section s = top.child("calibration");
    s.get("seeds", c.calibration.seeds);
    s.get("horizon", c.calibration.horizon);
    s.get("sample_every", c.calibration.sample_every);
    s.finish();
    require(c.calibration.seeds >= 1, "calibration.seeds", "must be at least 1");
    require(c.calibration.horizon > 0, "calibration.horizon", "must be positive");
    require(c.calibration.sample_every > 0, "calibration.sample_every", "must be positive");
  }
  {
    Section s = top.child("speed_table");
    s.get("directions", c.speed_table.directions);
    s.get("radius", c.speed_table.radius);
    s.get("samples", c.speed_table.samples);
    s.get("increment", c.speed_table.increment);
    s.finish();
    require(c.speed_table.directions >= 2, "speed_table.directions", "must be at least 2");
    require(c.speed_table.radius >= 4, "speed_table.radius", "must be at least 4");
    require(static_cast<int>(c.speed_table.radius) % 4 == 0 &&
                c.speed_table.radius == static_cast<int>(c.speed_table.radius),
            "speed_table.radius", "must be a multiple of 4");
    require(c.speed_table.samples >= 2, "speed_table.samples", "must be at least 2");
  }
  {
    Section s = top.child("scaled");
    auto& b = c.scaled;
    s.get("initial", b.initial);
    s.get("initial_radius", b.initial_radius);
    s.get("height", b.height);
    s.get("rho_scale", b.rho_scale);
    s.get("rho_power", b.rho_power);
    s.get("shift", b.shift);
    s.get("epsilons", b.epsilons);
    s.get("delta", b.delta);
    s.get("level", b.level);
    s.get("times", b.times);
    s.get("seeds", b.seeds);
    s.get("solver_h", b.solver_h);
    s.get("required_pass", b.required_pass);
    s.get("probe_tolerance", b.probe_tolerance);
    s.get("required_seed_fraction", b.required_seed_fraction);
    s.get("probe_radius", b.probe_radius);
    s.finish();
    require(b.initial == "disk" || b.initial == "square", "scaled.initial", "must be disk or square");
    require(b.initial_radius > 0, "scaled.initial_radius", "must be positive");
    require(b.height > 0 && b.height <= 1, "scaled.height", "must lie in (0, 1]");
    require(b.rho_scale >= 0, "scaled.rho_scale", "must be nonnegative");
    require(b.shift >= 0, "scaled.shift", "must be nonnegative");
    require(!b.epsilons.empty(), "scaled.epsilons", "must not be empty");
    for (std::size_t k = 0; k < b.epsilons.size(); ++k) {
      require(b.epsilons[k] > 0, "scaled.epsilons", "entries must be positive");
      if (k > 0) require(b.epsilons[k] < b.epsilons[k - 1], "scaled.epsilons", "must be decreasing");
    }
    require(b.delta > 0 && b.delta < 1, "scaled.delta", "must lie in (0, 1)");
    require(b.level > 0 && b.level < 1, "scaled.level", "must lie in (0, 1)");
    require(!b.times.empty(), "scaled.times", "must not be empty");
    for (double t : b.times) require(t > 0, "scaled.times", "entries must be positive");
    require(b.seeds >= 1, "scaled.seeds", "must be at least 1");
    require(b.solver_h > 0, "scaled.solver_h", "must be positive");
    require(b.required_pass.empty() || b.required_pass.size() == b.epsilons.size(), "scaled.required_pass",
            "must be empty or match scaled.epsilons");
    require(b.probe_tolerance > 0, "scaled.probe_tolerance", "must be positive");
    require(b.required_seed_fraction >= 0 && b.required_seed_fraction <= 1, "scaled.required_seed_fraction",
            "must lie in [0, 1]");
    require(b.probe_radius > 0, "scaled.probe_radius", "must be positive");
  }
  {
    Section s = top.child("subadd");
    s.get("lo", c.subadd.lo);
    s.get("hi", c.subadd.hi);
    s.get("n_grid", c.subadd.n_grid);
    s.get("samples", c.subadd.samples);
    s.finish();
    require(c.subadd.lo >= 0 && c.subadd.hi >= c.subadd.lo, "subadd.lo/hi", "must satisfy 0 <= lo <= hi");
    require(c.subadd.n_grid.size() >= 2, "subadd.n_grid", "needs at least two entries");
    for (std::size_t k = 1; k < c.subadd.n_grid.size(); ++k)
      require(c.subadd.n_grid[k] > c.subadd.n_grid[k - 1], "subadd.n_grid", "must be increasing");
    require(c.subadd.n_grid.front() >= 1, "subadd.n_grid", "entries must be positive");
    require(c.subadd.samples >= 2, "subadd.samples", "must be at least 2");
  }
  {
    Section s = top.child("validation");
    s.get("flow_samples", c.flow_samples);
    s.finish();
    require(c.flow_samples >= 1, "validation.flow_samples", "must be at least 1");
  }
  top.finish();
  c.environment.seed = c.seed;
  return c;
}

ExperimentConfig parse_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read configuration file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str());
}

namespace {

// Shortest text that reads back to the same double.
std::string num(double v) {
  char buf[32];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

std::vector<std::string> nums(const std::vector<double>& v) {
  std::vector<std::string> out;
  for (double x : v) out.push_back(num(x));
  return out;
}

}  // namespace

std::string emit_config(const ExperimentConfig& c) {
  YAML::Emitter out;
  out << YAML::BeginMap;
  out << YAML::Key << "kind" << YAML::Value << to_string(c.kind);
  out << YAML::Key << "seed" << YAML::Value << c.seed;
  out << YAML::Key << "workers" << YAML::Value << c.workers;
  out << YAML::Key << "output" << YAML::Value << c.output;

  const auto& e = c.environment;
  out << YAML::Key << "environment" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "dim" << YAML::Value << e.dim;
  out << YAML::Key << "mode" << YAML::Value << to_string(e.mode);
  out << YAML::Key << "cell_duration" << YAML::Value << num(e.cell_duration);
  out << YAML::Key << "cell_size" << YAML::Value << num(e.cell_size);
  out << YAML::Key << "mollifier_radius" << YAML::Value << num(e.mollifier_radius);
  out << YAML::Key << "ellipticity" << YAML::Value << num(e.ellipticity);
  out << YAML::Key << "diffusion_max" << YAML::Value << num(e.diffusion_max);
  out << YAML::Key << "drift_max" << YAML::Value << num(e.drift_max);
  out << YAML::Key << "growth_min" << YAML::Value << num(e.growth_min);
  out << YAML::Key << "growth_max" << YAML::Value << num(e.growth_max);
  out << YAML::Key << "flame_min" << YAML::Value << num(e.flame_min);
  out << YAML::Key << "flame_max" << YAML::Value << num(e.flame_max);
  out << YAML::Key << "stream_amplitude" << YAML::Value << num(e.stream_amplitude);
  out << YAML::Key << "mean_flow" << YAML::Value << YAML::Flow << nums({e.mean_flow.x, e.mean_flow.y});
  out << YAML::EndMap;

  out << YAML::Key << "reaction" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "form" << YAML::Value << to_string(c.reaction.form);
  out << YAML::EndMap;

  out << YAML::Key << "solver" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "h" << YAML::Value << num(c.solver.h);
  out << YAML::Key << "cfl_fraction" << YAML::Value << num(c.solver.cfl_fraction);
  out << YAML::Key << "margin" << YAML::Value << num(c.solver.margin);
  out << YAML::Key << "box_slack" << YAML::Value << num(c.solver.box_slack);
  out << YAML::EndMap;

  out << YAML::Key << "calibration" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "seeds" << YAML::Value << c.calibration.seeds;
  out << YAML::Key << "horizon" << YAML::Value << num(c.calibration.horizon);
  out << YAML::Key << "sample_every" << YAML::Value << num(c.calibration.sample_every);
  out << YAML::EndMap;

  out << YAML::Key << "speed_table" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "directions" << YAML::Value << c.speed_table.directions;
  out << YAML::Key << "radius" << YAML::Value << num(c.speed_table.radius);
  out << YAML::Key << "samples" << YAML::Value << c.speed_table.samples;
  out << YAML::Key << "increment" << YAML::Value << c.speed_table.increment;
  out << YAML::EndMap;

  const auto& b = c.scaled;
  out << YAML::Key << "scaled" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "initial" << YAML::Value << b.initial;
  out << YAML::Key << "initial_radius" << YAML::Value << num(b.initial_radius);
  out << YAML::Key << "height" << YAML::Value << num(b.height);
  out << YAML::Key << "rho_scale" << YAML::Value << num(b.rho_scale);
  out << YAML::Key << "rho_power" << YAML::Value << num(b.rho_power);
  out << YAML::Key << "shift" << YAML::Value << num(b.shift);
  out << YAML::Key << "epsilons" << YAML::Value << YAML::Flow << nums(b.epsilons);
  out << YAML::Key << "delta" << YAML::Value << num(b.delta);
  out << YAML::Key << "level" << YAML::Value << num(b.level);
  out << YAML::Key << "times" << YAML::Value << YAML::Flow << nums(b.times);
  out << YAML::Key << "seeds" << YAML::Value << b.seeds;
  out << YAML::Key << "solver_h" << YAML::Value << num(b.solver_h);
  out << YAML::Key << "required_pass" << YAML::Value << YAML::Flow << nums(b.required_pass);
  out << YAML::Key << "probe_tolerance" << YAML::Value << num(b.probe_tolerance);
  out << YAML::Key << "required_seed_fraction" << YAML::Value << num(b.required_seed_fraction);
  out << YAML::Key << "probe_radius" << YAML::Value << num(b.probe_radius);
  out << YAML::EndMap;

  out << YAML::Key << "subadd" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "lo" << YAML::Value << num(c.subadd.lo);
  out << YAML::Key << "hi" << YAML::Value << num(c.subadd.hi);
  out << YAML::Key << "n_grid" << YAML::Value << YAML::Flow << c.subadd.n_grid;
  out << YAML::Key << "samples" << YAML::Value << c.subadd.samples;
  out << YAML::EndMap;

  out << YAML::Key << "validation" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "flow_samples" << YAML::Value << c.flow_samples;
  out << YAML::EndMap;

  out << YAML::EndMap;
  return std::string(out.c_str()) + "\n";
}

std::string emit_defaults(ExperimentKind kind) {
  ExperimentConfig c;
  c.kind = kind;
  c.seed = 1;
  auto random_kpp = [&] {
    auto& e = c.environment;
    e.mode = EnvMode::Kpp;
    e.mollifier_radius = 0.25;
    e.ellipticity = 0.8;
    e.diffusion_max = 1.2;
    e.drift_max = 0.4;
    e.growth_min = 0.6;
    e.growth_max = 1.4;
  };
  auto random_geq = [&] {
    auto& e = c.environment;
    e.mode = EnvMode::Geq;
    e.mollifier_radius = 0.25;
    e.flame_min = 0.8;
    e.flame_max = 1.2;
    e.stream_amplitude = 0.03;
  };
  switch (kind) {
    case ExperimentKind::ValidateEnv:
    case ExperimentKind::SubaddSynthetic:
      break;
    case ExperimentKind::SpeedTable:
    case ExperimentKind::WulffShape:
      c.speed_table.samples = 2;
      break;
    case ExperimentKind::Sandwich:
      random_kpp();
      c.solver.h = 0.5;
      c.speed_table.radius = 48;
      c.speed_table.samples = 8;
      c.scaled.epsilons = {0.125, 0.0625, 0.03125};
      break;
    case ExperimentKind::GeqLimit:
      random_geq();
      c.solver.h = 0.25;
      c.solver.margin = 3.0;
      c.speed_table.radius = 32;
      c.speed_table.samples = 8;
      c.scaled.epsilons = {0.125, 0.0625};
      c.scaled.times = {0.5, 1.0};
      c.scaled.seeds = 20;
      c.scaled.solver_h = 0.25;
      c.scaled.rho_scale = 0.0;
      break;
    case ExperimentKind::FullPipeline:
      random_geq();
      c.solver.h = 0.25;
      c.solver.margin = 3.0;
      c.calibration.seeds = 4;
      c.calibration.horizon = 6.0;
      c.speed_table.directions = 16;
      c.speed_table.radius = 16;
      c.speed_table.samples = 3;
      c.scaled.epsilons = {0.25, 0.125};
      c.scaled.times = {0.5, 1.0};
      c.scaled.seeds = 3;
      c.scaled.solver_h = 0.25;
      c.scaled.rho_scale = 0.0;
      c.flow_samples = 20;
      break;
  }
  return emit_config(c);
}

std::string config_hash(const ExperimentConfig& cfg) {
  const std::string text = emit_config(cfg);
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace homog
