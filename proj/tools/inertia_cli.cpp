// inertia-cli: run the inertial scheme with its monitors from an INI config.
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"

#include "inertia/config.hpp"
#include "inertia/errors.hpp"
#include "inertia/experiment.hpp"

namespace {

struct Flags {
  std::string config_path;
  std::optional<std::string> out_dir;
  std::optional<unsigned> workers;
  std::optional<std::uint64_t> seed;
};

void add_common(CLI::App* cmd, Flags& flags) {
  cmd->add_option("--config", flags.config_path, "INI config file (defaults apply if omitted)");
  cmd->add_option("--out", flags.out_dir, "output directory (overrides [output] dir)");
  cmd->add_option("--workers", flags.workers, "sweep worker threads")
      ->check(CLI::Range(1u, 1024u));
  cmd->add_option("--seed", flags.seed, "seed for the random start preset");
}

inertia::ExperimentConfig load(const Flags& flags) {
  inertia::ExperimentConfig config =
      flags.config_path.empty() ? inertia::ExperimentConfig{} : inertia::load_config(flags.config_path);
  if (flags.out_dir) config.output_dir = *flags.out_dir;
  if (flags.workers) config.workers = *flags.workers;
  if (flags.seed) config.seed = *flags.seed;
  return config;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Inertial gradient method with energy, gradient-bound, rate and ODE monitors"};
  app.require_subcommand(1);

  Flags flags;
  auto* run = app.add_subcommand("run", "single run; writes trajectory.csv and report.json");
  auto* sweep = app.add_subcommand("sweep", "grid over [sweep] lists; writes summary.csv");
  auto* rates = app.add_subcommand("rates", "rate envelopes and fitted slopes; writes rates.json");
  auto* ode = app.add_subcommand("ode-compare", "discrete vs ODE distance; writes ode_compare.csv");
  auto* list = app.add_subcommand("list-objectives", "print the objective corpus and id grammar");
  auto* grads = app.add_subcommand("check-gradients", "finite-difference check of the corpus");
  auto* dump = app.add_subcommand("default-config", "print a config file with every default");
  for (auto* cmd : {run, sweep, rates, ode, grads}) add_common(cmd, flags);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : inertia::kExitConfig;
  }

  if (*list) return inertia::cmd_list_objectives(std::cout);
  if (*dump) {
    std::cout << inertia::default_config_text();
    return 0;
  }

  inertia::ExperimentConfig config;
  try {
    config = load(flags);
  } catch (const inertia::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return inertia::kExitConfig;
  }

  if (*run) return inertia::cmd_run(config, std::cerr);
  if (*sweep) return inertia::cmd_sweep(config, std::cerr);
  if (*rates) return inertia::cmd_rates(config, std::cerr);
  if (*ode) return inertia::cmd_ode(config, std::cerr);
  return inertia::cmd_check_gradients(config, std::cout);
}
