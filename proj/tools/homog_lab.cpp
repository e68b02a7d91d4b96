#include <CLI11.hpp>

#include <iostream>

#include "homog/config.hpp"
#include "homog/runner.hpp"

int main(int argc, char** argv) {
  using namespace homog;

  CLI::App app{"homog-lab: stochastic homogenization experiments"};
  app.set_version_flag("--version", std::string(HOMOG_VERSION));
  app.require_subcommand(1);

  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<int> workers;
  std::optional<std::string> out;
  auto* run = app.add_subcommand("run", "run the experiment described by a config");
  run->add_option("config", config_path, "config file")->required();
  run->add_option("--seed", seed, "master seed override");
  run->add_option("--workers", workers, "worker threads");
  run->add_option("--out", out, "output directory");

  auto* validate = app.add_subcommand("validate", "parse a config and check the environment hypotheses");
  validate->add_option("config", config_path, "config file")->required();

  std::string kind;
  auto* defaults = app.add_subcommand("emit-defaults", "print a complete default config for a kind");
  defaults->add_option("kind", kind, "experiment kind")->required()->check(CLI::IsMember(experiment_kinds()));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : exit_config;
  }

  try {
    if (*defaults) {
      std::cout << emit_defaults(parse_kind(kind));
      return exit_pass;
    }
    ExperimentConfig cfg = parse_config(config_path);
    if (*validate) {
      const ValidationReport rep = validate_config(cfg);
      std::cout << rep.to_text();
      return rep.ok() ? exit_pass : exit_assertion;
    }
    cfg = apply_overrides(std::move(cfg), {seed, workers, out});
    const RunResult res = run_experiment(cfg, config_path, std::cout);
    std::cout << "exit " << res.exit_code << "\n";
    return res.exit_code;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return exit_config;
  } catch (const InvalidSpec& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return exit_config;
  } catch (const NumericalAnomaly& e) {
    std::cerr << "numerical anomaly: " << e.what() << "\n";
    return exit_anomaly;
  }
}
