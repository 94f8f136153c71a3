#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "inertia/objectives.hpp"
#include "inertia/solver.hpp"

namespace inertia {

/// Coefficients of the energy inequality at index n >= 1:
///
///   C_n ||x_{n+1} + x_{n-1} - 2 x_n||^2 + Delta_n ||x_n - x_{n-1}||^2
///       <= E_n - E_{n+1},           E_n = g(y_n) + delta_n ||x_n - x_{n-1}||^2
///
/// with delta_n = A_{n-1} - C_{n-1} and Delta_n = B_n + A_{n-1} - C_{n-1} - C_n.
struct CoefficientSet {
  std::size_t n = 1;
  double A_prev = 0.0;  // A_{n-1}
  double B = 0.0;       // B_n
  double C_prev = 0.0;  // C_{n-1}
  double C = 0.0;       // C_n
  double delta = 0.0;
  double Delta = 0.0;
};

CoefficientSet coefficients(std::size_t n, const InertialParams& params, double lipschitz);

/// Limits of A_n, B_n, C_n, delta_n, Delta_n as n -> infinity. All strictly
/// positive for admissible parameters.
struct CoefficientLimits {
  double A = 0.0;
  double B = 0.0;
  double C = 0.0;
  double delta = 0.0;
  double Delta = 0.0;
};

CoefficientLimits coefficient_limits(const InertialParams& params, double lipschitz);

inline constexpr std::size_t kDefaultScanLimit = 1'000'000;

/// Smallest N <= n_max such that delta_n, Delta_n and C_n are all > 0 for
/// every n in [N, n_max]. Throws NotFoundError carrying the last violating n.
std::size_t critical_index(const InertialParams& params, double lipschitz,
                           std::size_t n_max = kDefaultScanLimit);

struct EnergyRecord {
  std::size_t n = 0;
  double E = 0.0;
  double delta = 0.0;
  double Delta = 0.0;
  // Only meaningful where delta >= 0; NaN / empty otherwise.
  Vector u;  // sqrt(2 delta_n) (x_n - x_{n-1}) + y_n
  double H_yu = 0.0;
  double grad_H_norm = 0.0;  // Euclidean norm on R^m x R^m
};

/// One failed inequality lhs <= rhs (+ slack).
struct Violation {
  std::size_t n = 0;
  double lhs = 0.0;
  double rhs = 0.0;
  double slack = 0.0;
};

struct EnergyReport {
  std::size_t critical_index = 0;
  double tolerance = 0.0;
  std::vector<EnergyRecord> records;  // records[k].n == k + 1
  std::vector<Violation> violations;  // E_{n+1} > E_n + tolerance for n >= N
  // min over n >= N with gap_n^2 > tolerance of (E_n - E_{n+1}) / gap_n^2;
  // NaN if there is no such n.
  double empirical_D = 0.0;

  bool passed() const { return violations.empty(); }
  /// E for iterate n (n >= 1).
  const EnergyRecord& at(std::size_t n) const { return records.at(n - 1); }
};

struct InstrumentOptions {
  double rel_tol = 1e-12;  // tolerance = rel_tol * (1 + |E_N|)
  std::size_t scan_limit = kDefaultScanLimit;
  // Start of the monotonicity check; replaces critical_index. Needed to
  // observe parameters outside the admissible region, where no N exists.
  std::optional<std::size_t> n_start;
};

/// Per-iterate energy and the monotonicity check past the critical index.
/// Throws InsufficientDataError when the trajectory has fewer than N + 2
/// records.
EnergyReport instrument(const Trajectory& traj, const Objective& obj,
                        const InstrumentOptions& options = {});

/// H(x, y) = g(x) + 1/2 ||y - x||^2.
double regularized_value(const Objective& obj, const Vector& x, const Vector& y);

/// grad H(x, y) = (grad g(x) + x - y, y - x), stacked.
Vector regularized_gradient(const Objective& obj, const Vector& x, const Vector& y);

struct GradHBoundsReport {
  std::size_t n_start = 0;
  std::size_t checked = 0;
  double worst_ratio_linear = 0.0;     // bound on ||grad H|| (1-norm of the product)
  double worst_ratio_quadratic = 0.0;  // bound on ||grad H||^2 (Euclidean)
  std::size_t worst_n = 0;
  std::vector<Violation> violations_linear;
  std::vector<Violation> violations_quadratic;

  double worst_ratio() const { return std::max(worst_ratio_linear, worst_ratio_quadratic); }
  bool passed() const { return violations_linear.empty() && violations_quadratic.empty(); }
};

struct GradHOptions {
  std::optional<std::size_t> n_start;  // default: critical_index
  double rel_slack = 1e-10;
  std::size_t scan_limit = kDefaultScanLimit;
};

/// Evaluates grad H(y_n, u_n) exactly and checks, for every n from n_start to
/// the second-to-last record,
///   ||grad H||_1   <= ||x_{n+1}-x_n|| / s + (beta n/(s(n+alpha)) + 2 sqrt(2 delta_n)) ||x_n-x_{n-1}||
///   ||grad H||_2^2 <= 2/s^2 ||x_{n+1}-x_n||^2
///                     + 2 ((beta n/(s(n+alpha)) - sqrt(2 delta_n))^2 + delta_n) ||x_n-x_{n-1}||^2
/// Throws RangeError if delta_n < 0 anywhere in the range.
GradHBoundsReport check_gradH_bounds(const Trajectory& traj, const Objective& obj,
                                     const GradHOptions& options = {});

}  // namespace inertia
