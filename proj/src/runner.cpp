#include "homog/runner.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <ostream>

#include "homog/ledger.hpp"
#include "homog/subadd.hpp"
#include "homog/ttime.hpp"

namespace homog {

namespace fs = std::filesystem;
using nlohmann::json;

std::string csv_number(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (std::isnan(v)) return "nan";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

ExperimentConfig apply_overrides(ExperimentConfig cfg, const RunOverrides& o) {
  if (o.seed) cfg.seed = *o.seed;
  if (o.workers) {
    if (*o.workers < 1) throw ConfigError("workers must be at least 1");
    cfg.workers = *o.workers;
  }
  if (o.out) cfg.output = *o.out;
  cfg.environment.seed = cfg.seed;
  return cfg;
}

ValidationReport validate_config(const ExperimentConfig& cfg) {
  return validate_hypotheses(cfg.environment, cfg.reaction, cfg.flow_samples);
}

ScaledExperiment make_scaled_experiment(const ExperimentConfig& cfg, const WulffShape& shape) {
  const auto& b = cfg.scaled;
  ScaledExperiment e;
  e.shape = shape;
  if (cfg.environment.mode == EnvMode::Geq) {
    e.initial = Disk{{0.0, 0.0}, 2.0};
    e.profile = bump_profile;
    e.modulus = bump_modulus;
  } else if (b.initial == "square") {
    const double r = b.initial_radius;
    e.initial = ConvexPolygon{{{-r, -r}, {r, -r}, {r, r}, {-r, r}}};
  } else {
    e.initial = Disk{{0.0, 0.0}, b.initial_radius};
  }
  e.height = b.height;
  e.rho_scale = b.rho_scale;
  e.rho_power = b.rho_power;
  e.shift = b.shift;
  e.epsilons = b.epsilons;
  e.delta = b.delta;
  e.level = b.level;
  e.times = b.times;
  e.seeds = b.seeds;
  e.master = cfg.seed;
  e.front = cfg.front_options();
  e.front.h = b.solver_h;
  return e;
}

namespace {

class Context {
 public:
  Context(const ExperimentConfig& cfg, const std::string& source, std::ostream& log)
      : cfg(cfg), source(source), log(log), hash(config_hash(cfg)), dir(cfg.output) {
    fs::create_directories(dir);
    fs::remove(dir / "ledger.jsonl");
    ledger = std::make_unique<RunLedger>((dir / "ledger.jsonl").string(), hash);
    std::ofstream(dir / "config.yaml") << emit_config(cfg);
    result.artifacts = {(dir / "config.yaml").string(), ledger->path()};
  }

  std::string reproduce() const {
    return "homog-lab run " + source + " --seed " + std::to_string(cfg.seed) + " --workers 1";
  }

  void check(const std::string& name, double value, double threshold, bool pass, std::string repro = {}) {
    if (!pass && repro.empty()) repro = reproduce();
    result.checks.push_back({name, value, threshold, pass, repro});
    log << (pass ? "PASS " : "FAIL ") << name << " value=" << csv_number(value)
        << " threshold=" << csv_number(threshold) << "\n";
    if (!pass) log << "  reproduce: " << repro << "\n";
    ledger->append("check", cfg.seed,
                   {{"name", name}, {"value", value}, {"threshold", threshold}, {"pass", pass}});
  }

  std::ofstream open(const std::string& name) {
    const auto p = dir / name;
    result.artifacts.push_back(p.string());
    std::ofstream out(p);
    if (!out) throw std::runtime_error("cannot write '" + p.string() + "'");
    return out;
  }

  void write_summary() {
    auto out = open("summary.csv");
    out << "check,value,threshold,pass\n";
    for (const auto& c : result.checks)
      out << c.name << "," << csv_number(c.value) << "," << csv_number(c.threshold) << "," << (c.pass ? 1 : 0)
          << "\n";
  }

  const ExperimentConfig& cfg;
  std::string source;
  std::ostream& log;
  std::string hash;
  fs::path dir;
  std::unique_ptr<RunLedger> ledger;
  RunResult result;
};

json estimate_json(const ConvergenceEstimate& e) {
  json j{{"n_grid", e.n_grid}, {"mean", e.mean},   {"sd", e.sd},
         {"count", e.count},   {"limit", e.limit}, {"limit_half_width", e.limit_half_width}};
  if (e.increment) {
    j["increment"] = *e.increment;
    j["increment_half_width"] = *e.increment_half_width;
  }
  return j;
}

bool run_validation(Context& ctx) {
  const ValidationReport rep = validate_config(ctx.cfg);
  ctx.ledger->append("validation", ctx.cfg.seed,
                     {{"temporal_dependence_range", temporal_dependence_range(ctx.cfg.environment)}});
  for (const auto& item : rep.items) {
    ctx.ledger->append("hypothesis", ctx.cfg.seed,
                       {{"name", item.name}, {"pass", item.pass}, {"margin", item.margin}, {"detail", item.detail}});
    ctx.check("hypothesis_" + item.name, item.margin, 0.0, item.pass);
  }
  return rep.ok();
}

DirectionalSpeedTable run_speed_table(Context& ctx, const std::string& csv_name) {
  const auto& c = ctx.cfg;
  SpeedTableOptions opt;
  opt.directions = c.speed_table.directions;
  opt.radius = c.speed_table.radius;
  opt.samples = c.speed_table.samples;
  opt.increment = c.speed_table.increment;
  opt.master = derive_seed(c.seed, {1});
  opt.front = c.front_options();
  DirectionalSpeedTable table = estimate_speed_table(c.environment, opt);
  for (std::size_t k = 0; k < table.size(); ++k) {
    json j = estimate_json(table.estimates[k]);
    j["k"] = k;
    j["e"] = {table.directions[k].x, table.directions[k].y};
    j["tau_bar"] = table.tau_bar[k];
    j["ci"] = table.ci[k];
    j["w"] = table.w[k];
    j["resolution"] = table.resolution;
    ctx.ledger->append("speed_estimate", opt.master, j);
  }
  auto out = ctx.open(csv_name);
  write_speed_table_csv(out, table);
  double lo = table.w.front(), hi = table.w.front();
  for (double w : table.w) {
    lo = std::min(lo, w);
    hi = std::max(hi, w);
  }
  ctx.check("speed_min", lo, 0.0, lo > 0.0 && std::isfinite(lo));
  ctx.check("speed_max", hi, 0.0, std::isfinite(hi));
  return table;
}

WulffShape run_shape(Context& ctx, const DirectionalSpeedTable& table) {
  WulffShape shape = assemble_shape(table);
  {
    auto out = ctx.open("shape.csv");
    write_polygon_csv(out, shape.hull().vertices);
  }
  {
    auto out = ctx.open("shape_radial.csv");
    write_polygon_csv(out, shape.vertices());
  }
  ctx.ledger->append("shape", ctx.cfg.seed, {{"vertices", shape.hull().vertices.size()},
                                               {"area", shape.hull().area()},
                                               {"min_speed", shape.min_speed()},
                                               {"max_speed", shape.max_speed()}});
  if (table.dim == 2 && table.size() >= 8) {
    const ConvexityReport rep = check_convexity(shape, table, table.h);
    ctx.ledger->append("convexity", ctx.cfg.seed,
                       {{"triples", rep.triples},
                        {"slack", rep.slack},
                        {"worst_margin", rep.worst_margin},
                        {"violations", rep.violations.size()},
                        {"vertices_off_hull", rep.vertices_off_hull}});
    ctx.check("convexity_worst_margin", rep.worst_margin, 0.0, rep.violations.empty());
    ctx.check("convexity_vertices_off_hull", rep.vertices_off_hull, 0.0, rep.vertices_off_hull == 0);
  }
  return shape;
}

MCalibration run_calibration(Context& ctx) {
  const auto& c = ctx.cfg;
  FrontOptions o = c.front_options();
  o.sample_every = c.calibration.sample_every;
  const Seed master = derive_seed(c.seed, {2});
  const MCalibration cal = calibrate_m(c.environment, o, c.calibration.seeds, c.calibration.horizon, master);
  ctx.ledger->append("calibration", master,
                     {{"m_emp", cal.m_emp},
                      {"hair_trigger", cal.hair_trigger},
                      {"outer_speed", cal.outer_speed},
                      {"inner_slowness", cal.inner_slowness},
                      {"seeds", cal.seeds},
                      {"horizon", c.calibration.horizon}});
  ctx.check("m_emp_finite", cal.m_emp, 0.0, std::isfinite(cal.m_emp) && cal.m_emp > 0.0);
  return cal;
}

void run_bounds(Context& ctx, const DirectionalSpeedTable& table, double m_emp) {
  const TableBoundsReport rep = check_table_bounds(table, m_emp);
  ctx.ledger->append("table_bounds", ctx.cfg.seed,
                     {{"m_emp", m_emp},
                      {"worst_bound_margin", rep.worst_bound_margin},
                      {"worst_lipschitz_margin", rep.worst_lipschitz_margin}});
  ctx.check("speed_bounds_margin", rep.worst_bound_margin, 0.0, rep.bound_violations == 0);
  ctx.check("speed_lipschitz_margin", rep.worst_lipschitz_margin, 0.0, rep.lipschitz_violations == 0);
}

void run_subadd(Context& ctx) {
  const auto& s = ctx.cfg.subadd;
  const TimedProcess p = additive_uniform_process(s.lo, s.hi);
  const Seed master = derive_seed(ctx.cfg.seed, {4});
  const ProcessReport rep = validate_process(p, 50, master);
  for (const auto& c : rep.checks) {
    ctx.ledger->append("process_hypothesis", master,
                       {{"name", c.name}, {"status", c.status}, {"instances", c.instances},
                        {"violations", c.violations}, {"worst_margin", c.worst_margin}});
    if (c.status == "sampled") ctx.check("process_" + c.name, c.violations, 0.0, c.violations == 0, c.reproduce);
  }
  const ConvergenceEstimate est = estimate_limit(p, s.n_grid, s.samples, master);
  ctx.ledger->append("estimate", master, estimate_json(est));
  auto out = ctx.open("subadd.csv");
  out << "n,mean,sd,half_width,count\n";
  for (std::size_t k = 0; k < est.n_grid.size(); ++k)
    out << est.n_grid[k] << "," << csv_number(est.mean[k]) << "," << csv_number(est.sd[k]) << ","
        << csv_number(est.half_width[k]) << "," << est.count[k] << "\n";
  const double expected = 0.5 * (s.lo + s.hi);
  const double se = est.sd.back() / std::sqrt(double(est.count.back()));
  ctx.check("limit_error", std::abs(est.limit - expected), 3.0 * se, std::abs(est.limit - expected) <= 3.0 * se);
  const double ratio = est.sd.front() > 0.0 ? est.sd.back() / est.sd.front() : 0.0;
  ctx.check("sd_ratio", ratio, 0.5, ratio <= 0.5);
}

void run_sandwich(Context& ctx, const WulffShape& shape) {
  const auto& c = ctx.cfg;
  const ScaledExperiment exp = make_scaled_experiment(c, shape);
  exp.check();
  const std::size_t E = exp.epsilons.size();
  const std::size_t S = static_cast<std::size_t>(exp.seeds);
  const auto cells = parallel_map<std::vector<SandwichResult>>(E * S, c.workers, [&](std::size_t i) {
    return sandwich_run(exp, c.environment, exp.epsilons[i / S],
                        derive_seed(c.seed, {3, static_cast<std::int64_t>(i / S), static_cast<std::int64_t>(i % S)}));
  });
  auto out = ctx.open("sandwich.csv");
  out << "eps,t,delta,seed,pass_inner,pass_outer,inner_margin,outer_margin\n";
  std::vector<Proportion> rates(E);
  for (std::size_t i = 0; i < cells.size(); ++i) {
    bool all = true;
    for (const auto& r : cells[i]) {
      out << csv_number(r.eps) << "," << csv_number(r.t) << "," << csv_number(exp.delta) << "," << r.seed << ","
          << r.inner << "," << r.outer << "," << csv_number(r.inner_margin) << "," << csv_number(r.outer_margin)
          << "\n";
      ctx.ledger->append("sandwich", r.seed,
                         {{"eps", r.eps}, {"t", r.t}, {"delta", exp.delta}, {"inner", r.inner}, {"outer", r.outer},
                          {"inner_margin", r.inner_margin}, {"outer_margin", r.outer_margin}});
      all = all && r.pass();
    }
    ++rates[i / S].trials;
    if (all) ++rates[i / S].passes;
  }
  auto rc = ctx.open("sandwich_rates.csv");
  rc << "eps,passes,trials,fraction,wilson_lo,wilson_hi\n";
  for (std::size_t e = 0; e < E; ++e) {
    const Interval w = wilson_interval(rates[e]);
    rc << csv_number(exp.epsilons[e]) << "," << rates[e].passes << "," << rates[e].trials << ","
       << csv_number(rates[e].fraction()) << "," << csv_number(w.lo) << "," << csv_number(w.hi) << "\n";
    if (!c.scaled.required_pass.empty()) {
      const double need = c.scaled.required_pass[e];
      ctx.check("sandwich_fraction_eps_" + csv_number(exp.epsilons[e]), rates[e].fraction(), need,
                rates[e].fraction() >= need);
    }
  }
  ctx.check("sandwich_trend", non_decreasing_within_wilson(rates) ? 1.0 : 0.0, 1.0, non_decreasing_within_wilson(rates));
}

void run_geq_limit(Context& ctx, const WulffShape& shape) {
  const auto& c = ctx.cfg;
  const ScaledExperiment exp = make_scaled_experiment(c, shape);
  const auto probes = default_probes(exp.times, c.scaled.probe_radius, 3, 8);
  const std::size_t E = exp.epsilons.size();
  const std::size_t S = static_cast<std::size_t>(exp.seeds);
  const auto cells = parallel_map<ProbeReport>(E * S, c.workers, [&](std::size_t i) {
    return geq_limit_check(exp, c.environment, exp.epsilons[i / S],
                           derive_seed(c.seed, {5, static_cast<std::int64_t>(i / S), static_cast<std::int64_t>(i % S)}),
                           probes, c.scaled.probe_tolerance);
  });
  auto out = ctx.open("geq_limit.csv");
  out << "eps,seed,max_error,failures,probes\n";
  std::vector<Proportion> rates(E);
  for (std::size_t i = 0; i < cells.size(); ++i) {
    const double eps = exp.epsilons[i / S];
    const Seed seed = derive_seed(c.seed, {5, static_cast<std::int64_t>(i / S), static_cast<std::int64_t>(i % S)});
    const auto& rep = cells[i];
    out << csv_number(eps) << "," << seed << "," << csv_number(rep.max_error) << "," << rep.failures << ","
        << rep.outcomes.size() << "\n";
    json values = json::array();
    for (const auto& o : rep.outcomes) values.push_back({o.probe.t, o.probe.x.x, o.probe.x.y, o.value, o.expected});
    ctx.ledger->append("geq_limit", seed, {{"eps", eps}, {"max_error", rep.max_error}, {"probes", values}});
    ++rates[i / S].trials;
    if (rep.max_error <= c.scaled.probe_tolerance) ++rates[i / S].passes;
  }
  auto rc = ctx.open("geq_limit_rates.csv");
  rc << "eps,passes,trials,fraction\n";
  for (std::size_t e = 0; e < E; ++e)
    rc << csv_number(exp.epsilons[e]) << "," << rates[e].passes << "," << rates[e].trials << ","
       << csv_number(rates[e].fraction()) << "\n";
  const double f = rates.back().fraction();
  ctx.check("geq_limit_fraction_eps_" + csv_number(exp.epsilons.back()), f, c.scaled.required_seed_fraction,
            f >= c.scaled.required_seed_fraction);
}

void run_kind(Context& ctx) {
  const auto& c = ctx.cfg;
  switch (c.kind) {
    case ExperimentKind::ValidateEnv:
      run_validation(ctx);
      return;
    case ExperimentKind::SubaddSynthetic:
      run_subadd(ctx);
      return;
    default:
      break;
  }
  if (!run_validation(ctx)) return;
  switch (c.kind) {
    case ExperimentKind::SpeedTable:
      run_speed_table(ctx, "speed_table.csv");
      break;
    case ExperimentKind::WulffShape:
      run_shape(ctx, run_speed_table(ctx, "speed_table.csv"));
      break;
    case ExperimentKind::Sandwich:
    case ExperimentKind::GeqLimit: {
      const bool geq = c.kind == ExperimentKind::GeqLimit;
      if (geq != (c.environment.mode == EnvMode::Geq))
        throw ConfigError(std::string("kind ") + to_string(c.kind) + " needs environment.mode " + (geq ? "geq" : "kpp"));
      const WulffShape shape = run_shape(ctx, run_speed_table(ctx, "speed_table.csv"));
      geq ? run_geq_limit(ctx, shape) : run_sandwich(ctx, shape);
      break;
    }
    case ExperimentKind::FullPipeline: {
      const MCalibration cal = run_calibration(ctx);
      const auto table = run_speed_table(ctx, "speed_table.csv");
      const WulffShape shape = run_shape(ctx, table);
      run_bounds(ctx, table, cal.m_emp);
      c.environment.mode == EnvMode::Geq ? run_geq_limit(ctx, shape) : run_sandwich(ctx, shape);
      break;
    }
    default:
      break;
  }
}

}  // namespace

RunResult run_experiment(const ExperimentConfig& cfg, const std::string& source, std::ostream& log) {
  Context ctx(cfg, source, log);
  log << "kind=" << to_string(cfg.kind) << " seed=" << cfg.seed << " config_hash=" << ctx.hash << "\n";
  try {
    run_kind(ctx);
  } catch (const ConfigError& e) {
    ctx.result.exit_code = exit_config;
    ctx.result.message = e.what();
  } catch (const NumericalAnomaly& e) {
    ctx.result.exit_code = exit_anomaly;
    ctx.result.message = e.what();
  } catch (const InvalidSpec& e) {
    ctx.result.exit_code = exit_config;
    ctx.result.message = e.what();
  }
  if (!ctx.result.message.empty()) {
    log << "error: " << ctx.result.message << "\n  reproduce: " << ctx.reproduce() << "\n";
    ctx.ledger->append("error", cfg.seed, {{"exit_code", ctx.result.exit_code}, {"message", ctx.result.message}});
  }
  ctx.write_summary();
  if (ctx.result.exit_code == exit_pass) {
    for (const auto& c : ctx.result.checks)
      if (!c.pass) ctx.result.exit_code = exit_assertion;
  }
  return ctx.result;
}

}  // namespace homog
