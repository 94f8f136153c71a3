#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "inertia/objectives.hpp"

namespace inertia {

/// Parameters (alpha, beta, s) of the inertial scheme
///   y_n     = x_n + beta n / (n + alpha) (x_n - x_{n-1})
///   x_{n+1} = y_n - s grad g(y_n)
/// Admissible iff alpha > 0, 0 < beta < 1 and 0 < s < 2 (1 - beta) / L_g.
struct InertialParams {
  double alpha = 3.0;
  double beta = 0.5;
  double step = 0.0;
};

/// 2 (1 - beta) / L_g; +inf when L_g == 0.
double step_bound(double beta, double lipschitz);

/// Throws ConfigError naming the violated constraint (and the computed bound
/// for the step size). Strict inequalities throughout.
void validate(const InertialParams& params, double lipschitz);

/// Extrapolation coefficient beta n / (n + alpha).
double inertial_coefficient(std::size_t n, const InertialParams& params);

struct IterateRecord {
  std::size_t n = 0;
  Vector x;
  Vector y;
  double g_x = 0.0;
  double g_y = 0.0;
  double grad_norm_y = 0.0;
  double gap = 0.0;  // ||x_n - x_{n-1}||, zero at n = 0
};

enum class Termination { gradient_tolerance, max_iterations, divergence_guard };

std::string_view to_string(Termination t);

struct Trajectory {
  std::vector<IterateRecord> records;
  Termination termination = Termination::max_iterations;
  InertialParams params;
  std::string objective_id;

  /// y of the last record: the point the gradient-tolerance stop certifies.
  const Vector& final_point() const { return records.back().y; }
};

struct StopRule {
  double grad_tol = 1e-10;
  std::size_t max_iter = 100000;
  double diverge_norm = 1e12;
};

struct InertialStep {
  Vector x_next;
  Vector y;
};

/// One step of the inertial scheme. Deterministic. Throws DivergenceError if
/// the gradient at y_n is not finite.
InertialStep step_inertial(const Vector& x, const Vector& x_prev, std::size_t n,
                           const InertialParams& params, const Objective& obj);

struct HeavyBallParams {
  double momentum = 0.0;  // in [0, 1)
  double step = 0.0;      // > 0
};

/// Polyak's heavy ball: the gradient is taken at x_n, not at the
/// extrapolated point.
Vector step_heavy_ball(const Vector& x, const Vector& x_prev, const HeavyBallParams& params,
                       const Objective& obj);

/// t_{n+1} = (sqrt(4 t_n^2 + 1) + 1) / 2.
double nesterov_next_t(double t);

/// t_n = (n + a - 1) / a, a >= 2.
double chambolle_dossal_t(std::size_t n, double a);

struct NesterovStep {
  Vector x_next;
  double t_next = 1.0;
};

/// Nesterov's scheme with extrapolation (t_n - 1) / t_{n+1}. Requires t >= 1
/// and step <= 1 / L_g.
NesterovStep step_nesterov(const Vector& x, const Vector& x_prev, double t,
                           const Objective& obj, double step);

enum class Admissibility { checked, unchecked };

/// Iterates the inertial scheme from x_0 = y_0 = x0 (with x_{-1} := x_0) and
/// records every iterate. Stops at ||grad g(y_n)|| <= grad_tol, at
/// n == max_iter, or once an iterate leaves the ball of radius diverge_norm
/// or becomes non-finite.
///
/// `Admissibility::unchecked` skips the step-size check; it exists only to
/// let tests observe what happens outside the admissible region.
Trajectory run(const Objective& obj, const InertialParams& params, const Vector& x0,
               const StopRule& stop = {}, Admissibility mode = Admissibility::checked);

}  // namespace inertia
