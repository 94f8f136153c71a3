#pragma once

#include <iosfwd>
#include <optional>
#include <string>

#include "inertia/config.hpp"
#include "inertia/reports.hpp"

namespace inertia {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;  // ran, but a check failed or the run did not converge
inline constexpr int kExitConfig = 2;   // rejected before running

/// Solver run plus every enabled monitor, without touching the filesystem.
struct MonitoredRun {
  Objective objective;
  InertialParams params;
  Vector x0;
  Trajectory trajectory;
  Json monitors;  // one entry per monitor, disabled ones included
  bool monitors_pass = true;

  bool converged() const {
    return trajectory.termination == Termination::gradient_tolerance;
  }
  bool ok() const { return converged() && monitors_pass; }
};

/// Throws ConfigError for an unknown objective or inadmissible parameters.
MonitoredRun execute(const ExperimentConfig& config);

/// Rates monitor on an existing run. Throws ConfigError when no exponent is
/// available from either the config or the objective.
Json rates_report(const ExperimentConfig& config, const Objective& obj, const Trajectory& traj);

/// report.json contents for a finished run.
Json run_report(const ExperimentConfig& config, const MonitoredRun& run);

// Commands. Each writes its artifacts under config.output_dir, logs to `log`
// and returns a process exit code.
int cmd_run(const ExperimentConfig& config, std::ostream& log);
int cmd_sweep(const ExperimentConfig& config, std::ostream& log);
int cmd_rates(const ExperimentConfig& config, std::ostream& log);
int cmd_ode(const ExperimentConfig& config, std::ostream& log);
int cmd_list_objectives(std::ostream& out);
int cmd_check_gradients(const ExperimentConfig& config, std::ostream& out);

}  // namespace inertia
