#include "inertia/solver.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include <fmt/format.h>

#include "inertia/errors.hpp"

namespace inertia {

double step_bound(double beta, double lipschitz) {
  if (lipschitz <= 0.0) return std::numeric_limits<double>::infinity();
  return 2.0 * (1.0 - beta) / lipschitz;
}

void validate(const InertialParams& params, double lipschitz) {
  if (!(params.alpha > 0.0) || !std::isfinite(params.alpha)) {
    throw ConfigError(fmt::format("alpha = {} violates alpha > 0", params.alpha));
  }
  if (!(params.beta > 0.0 && params.beta < 1.0)) {
    throw ConfigError(fmt::format("beta = {} violates beta in (0,1)", params.beta));
  }
  if (!(lipschitz >= 0.0) || !std::isfinite(lipschitz)) {
    throw ConfigError(fmt::format("Lipschitz constant {} is not a finite nonnegative number",
                                  lipschitz));
  }
  const double bound = step_bound(params.beta, lipschitz);
  if (!(params.step > 0.0 && params.step < bound)) {
    throw ConfigError(
        fmt::format("step s = {} violates 0 < s < 2(1-beta)/L_g = {} (beta = {}, L_g = {})",
                    params.step, bound, params.beta, lipschitz));
  }
}

double inertial_coefficient(std::size_t n, const InertialParams& params) {
  const auto dn = static_cast<double>(n);
  return params.beta * dn / (dn + params.alpha);
}

std::string_view to_string(Termination t) {
  switch (t) {
    case Termination::gradient_tolerance:
      return "gradient-tolerance";
    case Termination::max_iterations:
      return "max-iterations";
    case Termination::divergence_guard:
      return "divergence-guard";
  }
  return "unknown";
}

namespace {

void require_dims(const Vector& x, const Vector& x_prev, const Objective& obj) {
  if (x.size() != obj.dim || x_prev.size() != obj.dim) {
    throw InputError(fmt::format("iterate length {} / {} does not match objective dimension {}",
                                 x.size(), x_prev.size(), obj.dim));
  }
}

Vector finite_gradient(const Objective& obj, const Vector& at) {
  Vector g = obj.gradient(at);
  if (!g.allFinite()) throw DivergenceError("non-finite gradient", at);
  return g;
}

}  // namespace

InertialStep step_inertial(const Vector& x, const Vector& x_prev, std::size_t n,
                           const InertialParams& params, const Objective& obj) {
  require_dims(x, x_prev, obj);
  InertialStep out;
  out.y = x + inertial_coefficient(n, params) * (x - x_prev);
  out.x_next = out.y - params.step * finite_gradient(obj, out.y);
  return out;
}

Vector step_heavy_ball(const Vector& x, const Vector& x_prev, const HeavyBallParams& params,
                       const Objective& obj) {
  require_dims(x, x_prev, obj);
  if (!(params.momentum >= 0.0 && params.momentum < 1.0)) {
    throw ConfigError(fmt::format("momentum {} violates [0,1)", params.momentum));
  }
  if (!(params.step > 0.0)) throw ConfigError("heavy ball step must be positive");
  const Vector y = x + params.momentum * (x - x_prev);
  return y - params.step * finite_gradient(obj, x);
}

double nesterov_next_t(double t) { return (std::sqrt(4.0 * t * t + 1.0) + 1.0) / 2.0; }

double chambolle_dossal_t(std::size_t n, double a) {
  if (!(a >= 2.0)) throw ConfigError(fmt::format("Chambolle-Dossal a = {} violates a >= 2", a));
  return (static_cast<double>(n) + a - 1.0) / a;
}

NesterovStep step_nesterov(const Vector& x, const Vector& x_prev, double t, const Objective& obj,
                           double step) {
  require_dims(x, x_prev, obj);
  if (!(t >= 1.0)) throw ConfigError(fmt::format("t_n = {} violates t_n >= 1", t));
  if (!(step > 0.0) || (obj.lipschitz > 0.0 && step > 1.0 / obj.lipschitz)) {
    throw ConfigError(fmt::format("step s = {} violates 0 < s <= 1/L_g = {}", step,
                                  1.0 / obj.lipschitz));
  }
  NesterovStep out;
  out.t_next = nesterov_next_t(t);
  const Vector y = x + ((t - 1.0) / out.t_next) * (x - x_prev);
  out.x_next = y - step * finite_gradient(obj, y);
  return out;
}

Trajectory run(const Objective& obj, const InertialParams& params, const Vector& x0,
               const StopRule& stop, Admissibility mode) {
  if (mode == Admissibility::checked) {
    validate(params, obj.lipschitz);
  } else if (!(params.alpha > 0.0) || !(params.step > 0.0)) {
    throw ConfigError("alpha and step must be positive even when the step bound is not enforced");
  }
  if (x0.size() != obj.dim) {
    throw InputError(fmt::format("start point has length {}, objective dimension is {}",
                                 x0.size(), obj.dim));
  }
  if (!x0.allFinite()) throw InputError("start point is not finite");

  Trajectory traj;
  traj.params = params;
  traj.objective_id = obj.id;

  Vector x_prev = x0;
  Vector x = x0;
  for (std::size_t n = 0;; ++n) {
    IterateRecord rec;
    rec.n = n;
    rec.gap = (x - x_prev).norm();
    rec.y = x + inertial_coefficient(n, params) * (x - x_prev);
    const Vector grad = obj.gradient(rec.y);
    rec.g_x = obj.value(x);
    rec.g_y = obj.value(rec.y);
    rec.grad_norm_y = grad.norm();
    rec.x = x;
    if (!grad.allFinite() || !rec.y.allFinite() || !std::isfinite(rec.g_y)) {
      traj.termination = Termination::divergence_guard;
      break;
    }
    traj.records.push_back(std::move(rec));
    const IterateRecord& last = traj.records.back();

    if (last.grad_norm_y <= stop.grad_tol) {
      traj.termination = Termination::gradient_tolerance;
      break;
    }
    if (n >= stop.max_iter) {
      traj.termination = Termination::max_iterations;
      break;
    }
    Vector x_next = last.y - params.step * grad;
    if (!x_next.allFinite() || x_next.norm() > stop.diverge_norm) {
      traj.termination = Termination::divergence_guard;
      break;
    }
    x_prev = std::move(x);
    x = std::move(x_next);
  }
  return traj;
}

}  // namespace inertia
