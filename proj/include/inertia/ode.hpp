#pragma once

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

#include "inertia/objectives.hpp"

namespace inertia {

/// avd:    x'' + (alpha / t) x' + grad g(x) = 0
/// damped: x'' + (gamma + alpha / t) x' + grad g(x) = 0
enum class OdeVariant { avd, damped };

std::string_view to_string(OdeVariant v);
OdeVariant parse_ode_variant(std::string_view name);

struct OdeSpec {
  OdeVariant variant = OdeVariant::damped;
  double alpha = 3.0;
  double gamma = 0.0;  // ignored by avd
  double t0 = 1.0;     // must be > 0
  Vector x0;
  Vector v0;
};

struct OdeSample {
  double t = 0.0;
  Vector x;
  Vector v;
};

/// Classical RK4 on the first-order system (x, v), fixed step dt, sampled at
/// every step starting with the initial state. Takes floor((t_end - t0)/dt)
/// steps (with a 1e-9 relative allowance for round-off in the ratio). Throws
/// DivergenceError on a non-finite state.
std::vector<OdeSample> integrate(const OdeSpec& spec, const Objective& obj, double t_end,
                                 double dt);

/// Observed order log2(e(h) / e(h/2)), where e is the distance of the state
/// (x, v) at t_end from an h/16 reference. (t_end - t0) / dt should be an
/// integer.
double self_convergence_order(const OdeSpec& spec, const Objective& obj, double t_end,
                              double dt);

struct CompareOptions {
  std::size_t match_index = 5;  // n0: initial conditions taken from x_{n0}, x_{n0-1}
  int substeps = 8;             // ODE steps per discrete step, dt = sqrt(s) / substeps
  double t_end = 5.0;
  Vector x0;  // discrete start; obj.default_start when empty
};

struct CompareRow {
  double s = 0.0;
  double beta = 0.0;
  std::size_t n_compared = 0;
  double sup_distance = 0.0;
};

/// beta(s) = 1 - gamma s (avd) or 1 - gamma sqrt(s) (damped).
double matched_beta(OdeVariant variant, double gamma, double s);

/// For each s: run the inertial scheme with (alpha, beta(s), s), start the
/// ODE at t0 = n0 sqrt(s) from x(t0) = x_{n0}, v(t0) = (x_{n0} - x_{n0-1}) /
/// sqrt(s), and report max_n ||x_n - x(n sqrt(s))|| for n0 <= n <= t_end/sqrt(s).
/// Throws ConfigError if beta(s) or s is inadmissible.
std::vector<CompareRow> compare_discrete_continuous(const Objective& obj, double gamma,
                                                    double alpha, std::span<const double> s_list,
                                                    OdeVariant variant,
                                                    const CompareOptions& options = {});

}  // namespace inertia
