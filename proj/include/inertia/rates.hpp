#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string_view>

#include "inertia/objectives.hpp"
#include "inertia/solver.hpp"

namespace inertia {

enum class RateRegime { fast, slow };

/// Predicted polynomial decay exponents for a Lojasiewicz exponent theta:
///  - theta <= 1/2: value gaps decay like n^-p for every p > 0 and iterate
///    distances like n^-(p/2); p is chosen by the caller.
///  - theta  > 1/2: value gaps n^-(1/(2 theta - 1)), iterate distances
///    n^-((1 - theta)/(2 theta - 1)).
struct RatePrediction {
  double theta = 0.5;
  RateRegime regime = RateRegime::fast;
  double value_exponent = 0.0;
  double iterate_exponent = 0.0;
  std::optional<double> p;
};

/// Throws DomainError for theta outside (0,1), or for theta <= 1/2 without
/// a positive p.
RatePrediction predict(double theta, std::optional<double> p = std::nullopt);

enum class RateQuantity { value_gap_y, value_gap_x, iterate_dist, ynorm_dist };

std::string_view to_string(RateQuantity q);
std::string_view to_string(RateRegime r);
RateQuantity parse_rate_quantity(std::string_view name);

/// Predicted exponent for the given quantity (value or iterate family).
double predicted_exponent(const RatePrediction& prediction, RateQuantity quantity);

/// Ordinary least squares of log(y) on log(x). Pairs with a nonpositive
/// coordinate are dropped. Throws InsufficientDataError below 10 usable
/// pairs and DegenerateFitError when more than half were dropped.
struct LogLogFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
  std::size_t used = 0;
  std::size_t dropped = 0;
};

LogLogFit fit_log_log(std::span<const double> x, std::span<const double> y);

struct RateFit {
  double slope = 0.0;
  std::size_t n_lo = 0;
  std::size_t n_hi = 0;
  double r_squared = 0.0;
  RateQuantity quantity = RateQuantity::value_gap_y;
  std::size_t points = 0;
};

/// Index window [n_lo, n_hi] covering the last `fraction` of the
/// pre-termination iterates, excluding the final 5 records.
struct Window {
  std::size_t n_lo = 0;
  std::size_t n_hi = 0;
};

Window tail_window(const Trajectory& traj, double fraction);

/// Value of the tracked quantity at record n (may be <= 0 near round-off).
double rate_quantity(const Trajectory& traj, const Objective& obj, RateQuantity quantity,
                     std::size_t n);

/// Log-log slope of the quantity against the iteration index over the tail
/// window. Decay n^-c gives slope ~ -c. Requires obj.known_critical_point.
RateFit fit_rate(const Trajectory& traj, const Objective& obj, RateQuantity quantity,
                 double window_fraction = 0.5);

struct BoundCheck {
  RateQuantity quantity = RateQuantity::value_gap_y;
  double exponent = 0.0;
  double fitted_constant = 0.0;     // max over n >= n_start of q_n n^exponent
  double first_half_constant = 0.0; // same, over the first half of the range
  std::size_t worst_n = 0;
  std::size_t n_start = 0;
  std::size_t n_end = 0;
  bool holds = false;  // finite and first-half / whole agree within factor 2
};

/// One-sided envelope q_n <= c n^-exponent for n >= n_start. The constant is
/// the smallest one valid on the recorded range; `holds` additionally asks
/// that it is already attained (within factor 2) on the first half.
BoundCheck check_bound(const Trajectory& traj, const Objective& obj,
                       const RatePrediction& prediction, RateQuantity quantity,
                       std::size_t n_start);

/// Slope of log ||grad g(x_n)|| against log (g(x_n) - g(xbar)) over the tail:
/// the fitted Lojasiewicz exponent theta.
double estimate_loj_exponent(const Objective& obj, const Trajectory& traj,
                             double window_fraction = 0.5);

/// Same estimator applied to explicit (value gap, gradient norm) pairs.
double estimate_loj_exponent(std::span<const double> value_gaps,
                             std::span<const double> grad_norms);

}  // namespace inertia
