#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "inertia/objectives.hpp"
#include "inertia/ode.hpp"
#include "inertia/solver.hpp"

namespace inertia {

enum class Monitor { lyapunov, gradH, rates, ode_compare };

std::string_view to_string(Monitor m);
Monitor parse_monitor(std::string_view name);

// Parsed form of the INI file. Every field has a usable default, so an empty
// file describes a complete run.
struct ExperimentConfig {
  std::string objective_id = "quadratic:dim=10:cond=100";

  double alpha = 3.0;
  double beta = 0.5;
  std::optional<double> step;  // absolute s; wins over step_fraction
  double step_fraction = 0.8;  // s = fraction * 2 (1 - beta) / L_g

  std::string x0 = "default";  // default | zeros | random | comma list
  std::uint64_t seed = 0;

  StopRule stop;
  std::vector<Monitor> monitors{Monitor::lyapunov, Monitor::gradH};

  std::optional<double> theta;       // falls back to the objective's exponent
  std::vector<double> rate_orders{2.0, 4.0, 6.0};
  double rate_window = 0.5;
  std::size_t rate_margin = 10;      // envelopes start at N + margin

  OdeVariant ode_variant = OdeVariant::damped;
  double ode_gamma = 1.0;
  std::optional<double> ode_alpha;   // defaults to alpha
  std::vector<double> s_ladder{1e-2, 2.5e-3, 6.25e-4};
  double ode_t_end = 5.0;
  std::size_t ode_match_index = 5;
  int ode_substeps = 8;

  // Absent list -> the single base value; present but empty -> empty grid.
  std::optional<std::vector<double>> sweep_alpha;
  std::optional<std::vector<double>> sweep_beta;
  std::optional<std::vector<double>> sweep_s_fraction;
  std::optional<std::vector<std::string>> sweep_objective;

  std::filesystem::path output_dir = "out";
  unsigned workers = 1;

  // section.key -> raw value, in file order, for provenance.
  std::vector<std::pair<std::string, std::string>> echo;

  bool monitor_enabled(Monitor m) const;
};

/// Throws ConfigError on syntax errors, unknown sections or keys, and
/// malformed or out-of-range values.
ExperimentConfig parse_config(std::istream& in);
ExperimentConfig load_config(const std::filesystem::path& path);

/// Resolved step: explicit s, or step_fraction times the bound. Validates
/// the triple against the objective.
InertialParams resolve_params(const ExperimentConfig& config, const Objective& obj);

/// x0 from the preset or the explicit list. `random` draws uniformly from
/// the objective's box with the config seed.
Vector resolve_start(const ExperimentConfig& config, const Objective& obj);

/// The effective configuration as an INI file that parses back to the same
/// values.
std::string render_config(const ExperimentConfig& config);

/// render_config of a default-constructed config.
std::string default_config_text();

}  // namespace inertia
