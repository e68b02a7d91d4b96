#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "homog/config.hpp"
#include "homog/homog.hpp"
#include "homog/runner.hpp"

namespace py = pybind11;
using namespace homog;

namespace {

py::dict coefficients(const Coefficients& c) {
  py::dict d;
  if (const auto* k = std::get_if<KppCoefficients>(&c)) {
    d["diffusion"] = py::make_tuple(k->diffusion[0], k->diffusion[1]);
    d["drift"] = py::make_tuple(k->drift.x, k->drift.y);
    d["growth"] = k->growth;
  } else {
    const auto& g = std::get<GeqCoefficients>(c);
    d["flame"] = g.flame;
    d["flow"] = py::make_tuple(g.flow.x, g.flow.y);
    d["stream"] = g.stream;
  }
  return d;
}

py::list hypotheses(const ValidationReport& rep) {
  py::list out;
  for (const auto& h : rep.items) {
    py::dict d;
    d["name"] = h.name;
    d["pass"] = h.pass;
    d["margin"] = h.margin;
    d["detail"] = h.detail;
    out.append(d);
  }
  return out;
}

}  // namespace

PYBIND11_MODULE(_homog_lab, m) {
  m.doc() = "Stochastic homogenization experiments for KPP and G-equation fronts";
  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<InvalidSpec>(m, "InvalidSpec", PyExc_ValueError);
  py::register_exception<NumericalAnomaly>(m, "NumericalAnomaly", PyExc_RuntimeError);

  m.attr("__version__") = HOMOG_VERSION;
  m.def("experiment_kinds", &experiment_kinds);
  m.def("emit_defaults", [](const std::string& kind) { return emit_defaults(parse_kind(kind)); }, py::arg("kind"));
  m.def(
      "canonical_config", [](const std::string& text) { return emit_config(parse_config_text(text)); },
      py::arg("text"), "Parse a YAML config and return its canonical form.");
  m.def(
      "config_hash", [](const std::string& text) { return config_hash(parse_config_text(text)); }, py::arg("text"));
  m.def(
      "validate", [](const std::string& text) { return hypotheses(validate_config(parse_config_text(text))); },
      py::arg("text"), "Hypothesis checks for the config's environment and reaction.");

  m.def(
      "evaluate",
      [](const std::string& text, double t, double x, double y) {
        const ExperimentConfig cfg = parse_config_text(text);
        const Environment env = build_environment(cfg.environment, cfg.seed);
        return coefficients(evaluate(env, t, {x, y}));
      },
      py::arg("text"), py::arg("t"), py::arg("x"), py::arg("y") = 0.0,
      "Coefficient fields of the config's environment at one space-time point.");

  m.def(
      "speed_table",
      [](const std::string& text) {
        const ExperimentConfig cfg = parse_config_text(text);
        SpeedTableOptions opt;
        opt.directions = cfg.speed_table.directions;
        opt.radius = cfg.speed_table.radius;
        opt.samples = cfg.speed_table.samples;
        opt.increment = cfg.speed_table.increment;
        opt.master = cfg.seed;
        opt.front = cfg.front_options();
        DirectionalSpeedTable t;
        {
          py::gil_scoped_release release;
          t = estimate_speed_table(cfg.environment, opt);
        }
        py::dict d;
        py::list dirs;
        for (Point e : t.directions) dirs.append(py::make_tuple(e.x, e.y));
        d["directions"] = dirs;
        d["w"] = t.w;
        d["w_ci"] = t.w_ci;
        d["tau_bar"] = t.tau_bar;
        d["ci"] = t.ci;
        return d;
      },
      py::arg("text"), "Directional front speeds from the config's speed_table block.");

  m.def(
      "run",
      [](const std::string& text, const std::string& out, std::optional<std::uint64_t> seed,
         std::optional<int> workers) {
        const ExperimentConfig cfg = apply_overrides(parse_config_text(text), {seed, workers, out});
        std::ostringstream log;
        RunResult res;
        {
          py::gil_scoped_release release;
          res = run_experiment(cfg, "<python>", log);
        }
        py::list checks;
        for (const auto& c : res.checks) {
          py::dict d;
          d["name"] = c.name;
          d["value"] = c.value;
          d["threshold"] = c.threshold;
          d["pass"] = c.pass;
          checks.append(d);
        }
        py::dict d;
        d["exit_code"] = res.exit_code;
        d["checks"] = checks;
        d["artifacts"] = res.artifacts;
        d["message"] = res.message;
        d["log"] = log.str();
        return d;
      },
      py::arg("text"), py::arg("out"), py::arg("seed") = py::none(), py::arg("workers") = py::none(),
      "Run an experiment config, writing its artifacts under `out`.");

  m.def(
      "wilson_interval",
      [](int passes, int trials, double z) {
        const Interval w = wilson_interval({passes, trials}, z);
        return py::make_tuple(w.lo, w.hi);
      },
      py::arg("passes"), py::arg("trials"), py::arg("z") = 1.96);
}
