#include "inertia/lyapunov.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "inertia/errors.hpp"

namespace inertia {

namespace {

// A_{m-1} and C_{m-1} written in terms of m.
double a_before(double m, double alpha, double beta, double s, double L) {
  const double k = (2.0 - s * L) / (2.0 * s);
  const double r = ((1.0 + beta) * m + alpha) / (m + alpha);
  return k * r * r - beta * m * ((1.0 + beta) * m + alpha) / (s * (m + alpha) * (m + alpha));
}

double c_before(double m, double alpha, double beta, double s, double L) {
  const double k = (2.0 - s * L) / (2.0 * s);
  const double lag = (beta * m - beta) / (m + alpha - 1.0);
  return k * lag * ((1.0 + beta) * m + alpha) / (m + alpha) -
         lag * beta * m / (m + alpha) / (2.0 * s);
}

double b_at(double n, double alpha, double beta, double s, double L) {
  const double c = beta * n / (n + alpha);
  return (2.0 - s * L) * c * c / (2.0 * s);
}

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

}  // namespace

CoefficientSet coefficients(std::size_t n, const InertialParams& params, double lipschitz) {
  if (n < 1) throw DomainError("coefficients: n must be >= 1");
  const double dn = static_cast<double>(n);
  const double a = params.alpha, b = params.beta, s = params.step, L = lipschitz;
  CoefficientSet c;
  c.n = n;
  c.A_prev = a_before(dn, a, b, s, L);
  c.C_prev = c_before(dn, a, b, s, L);
  c.C = c_before(dn + 1.0, a, b, s, L);
  c.B = b_at(dn, a, b, s, L);
  c.delta = c.A_prev - c.C_prev;
  c.Delta = c.B + c.A_prev - c.C_prev - c.C;
  return c;
}

CoefficientLimits coefficient_limits(const InertialParams& params, double lipschitz) {
  const double b = params.beta, s = params.step, sl = params.step * lipschitz;
  CoefficientLimits lim;
  lim.A = ((2.0 - sl) * (b + 1.0) * (b + 1.0) - 2.0 * b - 2.0 * b * b) / (2.0 * s);
  lim.B = (2.0 - sl) * b * b / (2.0 * s);
  lim.C = ((2.0 - sl) * (b * b + b) - b * b) / (2.0 * s);
  lim.Delta = (2.0 - sl - 2.0 * b) / (2.0 * s);
  lim.delta = (2.0 - b * b - sl * (b + 1.0)) / (2.0 * s);
  return lim;
}

std::size_t critical_index(const InertialParams& params, double lipschitz, std::size_t n_max) {
  if (n_max < 1) throw DomainError("critical_index: n_max must be >= 1");
  // Scan downward: the answer is one past the last violation.
  for (std::size_t n = n_max; n >= 1; --n) {
    const CoefficientSet c = coefficients(n, params, lipschitz);
    if (!(c.delta > 0.0 && c.Delta > 0.0 && c.C > 0.0)) {
      if (n == n_max) {
        throw NotFoundError(
            fmt::format("no index N <= {} with delta_n, Delta_n, C_n > 0 up to {}", n_max, n_max),
            n);
      }
      return n + 1;
    }
  }
  return 1;
}

double regularized_value(const Objective& obj, const Vector& x, const Vector& y) {
  return obj.value(x) + 0.5 * (y - x).squaredNorm();
}

Vector regularized_gradient(const Objective& obj, const Vector& x, const Vector& y) {
  Vector out(2 * x.size());
  out.head(x.size()) = obj.gradient(x) + x - y;
  out.tail(x.size()) = y - x;
  return out;
}

EnergyReport instrument(const Trajectory& traj, const Objective& obj,
                        const InstrumentOptions& options) {
  const auto& recs = traj.records;
  EnergyReport report;
  report.critical_index =
      options.n_start ? std::max<std::size_t>(*options.n_start, 1)
                      : critical_index(traj.params, obj.lipschitz, options.scan_limit);
  const std::size_t N = report.critical_index;
  if (recs.size() < N + 2) {
    throw InsufficientDataError(fmt::format(
        "trajectory has {} records, the energy check needs at least N + 2 = {}", recs.size(),
        N + 2));
  }

  report.records.reserve(recs.size() - 1);
  for (std::size_t n = 1; n < recs.size(); ++n) {
    const CoefficientSet c = coefficients(n, traj.params, obj.lipschitz);
    EnergyRecord e;
    e.n = n;
    e.delta = c.delta;
    e.Delta = c.Delta;
    e.E = recs[n].g_y + c.delta * recs[n].gap * recs[n].gap;
    if (c.delta >= 0.0) {
      e.u = std::sqrt(2.0 * c.delta) * (recs[n].x - recs[n - 1].x) + recs[n].y;
      e.H_yu = regularized_value(obj, recs[n].y, e.u);
      e.grad_H_norm = regularized_gradient(obj, recs[n].y, e.u).norm();
    } else {
      e.H_yu = kNaN;
      e.grad_H_norm = kNaN;
    }
    report.records.push_back(std::move(e));
  }

  report.tolerance = options.rel_tol * (1.0 + std::abs(report.at(N).E));
  report.empirical_D = kNaN;
  double best_D = std::numeric_limits<double>::infinity();
  for (std::size_t n = N; n + 1 < recs.size(); ++n) {
    const double en = report.at(n).E;
    const double next = report.at(n + 1).E;
    if (next > en + report.tolerance) {
      report.violations.push_back({n, next, en, report.tolerance});
    }
    // Steps whose squared gap is below the tolerance are dominated by rounding.
    const double gap2 = recs[n].gap * recs[n].gap;
    if (gap2 > report.tolerance) best_D = std::min(best_D, (en - next) / gap2);
  }
  if (std::isfinite(best_D)) report.empirical_D = best_D;
  return report;
}

GradHBoundsReport check_gradH_bounds(const Trajectory& traj, const Objective& obj,
                                     const GradHOptions& options) {
  const auto& recs = traj.records;
  const InertialParams& p = traj.params;
  GradHBoundsReport report;
  report.n_start = options.n_start ? *options.n_start
                                   : critical_index(p, obj.lipschitz, options.scan_limit);
  report.n_start = std::max<std::size_t>(report.n_start, 1);

  const auto ratio = [](double lhs, double rhs) {
    if (rhs > 0.0) return lhs / rhs;
    return lhs == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
  };

  for (std::size_t n = report.n_start; n + 1 < recs.size(); ++n) {
    const CoefficientSet c = coefficients(n, p, obj.lipschitz);
    if (c.delta < 0.0) {
      throw RangeError(fmt::format(
          "delta_{} = {} < 0: the bounds need delta_n >= 0; start at the critical index", n,
          c.delta));
    }
    const Vector& y = recs[n].y;
    const Vector u = std::sqrt(2.0 * c.delta) * (recs[n].x - recs[n - 1].x) + y;
    const Vector grad_g = obj.gradient(y);
    const Vector first = grad_g + y - u;
    const Vector second = u - y;

    const double step_gap = (recs[n + 1].x - recs[n].x).norm();
    const double gap = recs[n].gap;
    const double inertial = inertial_coefficient(n, p) / p.step;
    const double root = std::sqrt(2.0 * c.delta);

    const double lhs_lin = first.norm() + second.norm();
    const double rhs_lin = step_gap / p.step + (inertial + 2.0 * root) * gap;
    const double lhs_quad = first.squaredNorm() + second.squaredNorm();
    const double rhs_quad = 2.0 / (p.step * p.step) * step_gap * step_gap +
                            2.0 * ((inertial - root) * (inertial - root) + c.delta) * gap * gap;

    const double slack_lin = options.rel_slack * rhs_lin;
    const double slack_quad = options.rel_slack * rhs_quad;
    if (lhs_lin > rhs_lin + slack_lin) {
      report.violations_linear.push_back({n, lhs_lin, rhs_lin, slack_lin});
    }
    if (lhs_quad > rhs_quad + slack_quad) {
      report.violations_quadratic.push_back({n, lhs_quad, rhs_quad, slack_quad});
    }
    const double r_lin = ratio(lhs_lin, rhs_lin);
    const double r_quad = ratio(lhs_quad, rhs_quad);
    if (std::max(r_lin, r_quad) > report.worst_ratio()) report.worst_n = n;
    report.worst_ratio_linear = std::max(report.worst_ratio_linear, r_lin);
    report.worst_ratio_quadratic = std::max(report.worst_ratio_quadratic, r_quad);
    ++report.checked;
  }
  return report;
}

}  // namespace inertia
