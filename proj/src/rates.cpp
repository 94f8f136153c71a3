#include "inertia/rates.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include <fmt/format.h>

#include "inertia/errors.hpp"

namespace inertia {

namespace {

constexpr std::size_t kMinFitPoints = 10;
constexpr std::size_t kExcludedTail = 5;

const Vector& critical_point_of(const Objective& obj) {
  if (!obj.known_critical_point) {
    throw InputError("objective '" + obj.id + "' has no known critical point");
  }
  return *obj.known_critical_point;
}

}  // namespace

RatePrediction predict(double theta, std::optional<double> p) {
  if (!(theta > 0.0 && theta < 1.0)) {
    throw DomainError(fmt::format("theta = {} is outside (0,1)", theta));
  }
  RatePrediction out;
  out.theta = theta;
  if (theta <= 0.5) {
    if (!p || !(*p > 0.0) || !std::isfinite(*p)) {
      throw DomainError("theta <= 1/2 needs a positive rate order p to test");
    }
    out.regime = RateRegime::fast;
    out.p = p;
    out.value_exponent = *p;
    out.iterate_exponent = *p / 2.0;
  } else {
    out.regime = RateRegime::slow;
    out.value_exponent = 1.0 / (2.0 * theta - 1.0);
    out.iterate_exponent = (1.0 - theta) / (2.0 * theta - 1.0);
  }
  return out;
}

std::string_view to_string(RateQuantity q) {
  switch (q) {
    case RateQuantity::value_gap_y:
      return "value_gap_y";
    case RateQuantity::value_gap_x:
      return "value_gap_x";
    case RateQuantity::iterate_dist:
      return "iterate_dist";
    case RateQuantity::ynorm_dist:
      return "ynorm_dist";
  }
  return "unknown";
}

std::string_view to_string(RateRegime r) { return r == RateRegime::fast ? "fast" : "slow"; }

RateQuantity parse_rate_quantity(std::string_view name) {
  for (auto q : {RateQuantity::value_gap_y, RateQuantity::value_gap_x,
                 RateQuantity::iterate_dist, RateQuantity::ynorm_dist}) {
    if (to_string(q) == name) return q;
  }
  throw InputError(fmt::format("unknown rate quantity '{}'", name));
}

double predicted_exponent(const RatePrediction& prediction, RateQuantity quantity) {
  switch (quantity) {
    case RateQuantity::value_gap_y:
    case RateQuantity::value_gap_x:
      return prediction.value_exponent;
    case RateQuantity::iterate_dist:
    case RateQuantity::ynorm_dist:
      return prediction.iterate_exponent;
  }
  return prediction.value_exponent;
}

LogLogFit fit_log_log(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw InputError("fit_log_log: x and y differ in length");
  std::vector<double> lx, ly;
  lx.reserve(x.size());
  ly.reserve(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i] > 0.0 && y[i] > 0.0 && std::isfinite(x[i]) && std::isfinite(y[i])) {
      lx.push_back(std::log(x[i]));
      ly.push_back(std::log(y[i]));
    }
  }
  LogLogFit fit;
  fit.used = lx.size();
  fit.dropped = x.size() - lx.size();
  if (fit.used < kMinFitPoints) {
    throw InsufficientDataError(
        fmt::format("log-log fit needs at least {} positive points, got {}", kMinFitPoints,
                    fit.used));
  }
  if (2 * fit.dropped > x.size()) {
    throw DegenerateFitError(fmt::format("{} of {} points are nonpositive", fit.dropped,
                                         x.size()));
  }

  const double count = static_cast<double>(fit.used);
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    mx += lx[i];
    my += ly[i];
  }
  mx /= count;
  my /= count;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    const double dx = lx[i] - mx, dy = ly[i] - my;
    sxx += dx * dx;
    sxy += dx * dy;
    syy += dy * dy;
  }
  if (!(sxx > 0.0)) throw DegenerateFitError("log-log fit: all abscissae coincide");
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  fit.r_squared = syy > 0.0 ? std::clamp(sxy * sxy / (sxx * syy), 0.0, 1.0) : 1.0;
  return fit;
}

Window tail_window(const Trajectory& traj, double fraction) {
  if (!(fraction > 0.0 && fraction < 1.0)) {
    throw DomainError(fmt::format("window fraction {} is outside (0,1)", fraction));
  }
  const std::size_t len = traj.records.size();
  if (len <= kExcludedTail + 2) {
    throw InsufficientDataError(fmt::format("trajectory of {} records is too short", len));
  }
  const std::size_t usable = len - kExcludedTail;  // records [0, usable)
  Window w;
  w.n_hi = usable - 1;
  const auto width = static_cast<std::size_t>(std::ceil(fraction * static_cast<double>(usable)));
  w.n_lo = std::max<std::size_t>(1, usable - std::min(width, usable));
  return w;
}

double rate_quantity(const Trajectory& traj, const Objective& obj, RateQuantity quantity,
                     std::size_t n) {
  const Vector& xbar = critical_point_of(obj);
  const IterateRecord& r = traj.records.at(n);
  switch (quantity) {
    case RateQuantity::value_gap_y:
      return r.g_y - obj.value(xbar);
    case RateQuantity::value_gap_x:
      return r.g_x - obj.value(xbar);
    case RateQuantity::iterate_dist:
      return (r.x - xbar).norm();
    case RateQuantity::ynorm_dist:
      return (r.y - xbar).norm();
  }
  return 0.0;
}

RateFit fit_rate(const Trajectory& traj, const Objective& obj, RateQuantity quantity,
                 double window_fraction) {
  critical_point_of(obj);
  const Window w = tail_window(traj, window_fraction);
  std::vector<double> ns, qs;
  for (std::size_t n = w.n_lo; n <= w.n_hi; ++n) {
    ns.push_back(static_cast<double>(n));
    qs.push_back(rate_quantity(traj, obj, quantity, n));
  }
  const LogLogFit fit = fit_log_log(ns, qs);
  RateFit out;
  out.slope = fit.slope;
  out.r_squared = fit.r_squared;
  out.n_lo = w.n_lo;
  out.n_hi = w.n_hi;
  out.quantity = quantity;
  out.points = fit.used;
  return out;
}

BoundCheck check_bound(const Trajectory& traj, const Objective& obj,
                       const RatePrediction& prediction, RateQuantity quantity,
                       std::size_t n_start) {
  critical_point_of(obj);
  BoundCheck out;
  out.quantity = quantity;
  out.exponent = predicted_exponent(prediction, quantity);
  out.n_start = std::max<std::size_t>(n_start, 1);
  const std::size_t len = traj.records.size();
  if (len <= out.n_start) {
    throw InsufficientDataError(
        fmt::format("n_start = {} is past the end of a {}-record trajectory", n_start, len));
  }
  out.n_end = len - 1;
  const std::size_t mid = out.n_start + (out.n_end - out.n_start) / 2;

  std::size_t used = 0, dropped = 0;
  double whole = 0.0, first = 0.0;
  for (std::size_t n = out.n_start; n <= out.n_end; ++n) {
    const double q = rate_quantity(traj, obj, quantity, n);
    if (!(q > 0.0)) {
      ++dropped;
      continue;
    }
    ++used;
    const double c = q * std::pow(static_cast<double>(n), out.exponent);
    if (c > whole) {
      whole = c;
      out.worst_n = n;
    }
    if (n <= mid) first = std::max(first, c);
  }
  if (used < kMinFitPoints) {
    throw InsufficientDataError(
        fmt::format("envelope check needs at least {} positive points, got {}", kMinFitPoints,
                    used));
  }
  if (2 * dropped > used + dropped) {
    throw DegenerateFitError(fmt::format("{} of {} points are nonpositive", dropped,
                                         used + dropped));
  }
  out.fitted_constant = whole;
  out.first_half_constant = first;
  out.holds = std::isfinite(whole) && first > 0.0 && whole <= 2.0 * first;
  return out;
}

double estimate_loj_exponent(std::span<const double> value_gaps,
                             std::span<const double> grad_norms) {
  return fit_log_log(value_gaps, grad_norms).slope;
}

double estimate_loj_exponent(const Objective& obj, const Trajectory& traj,
                             double window_fraction) {
  const Vector& xbar = critical_point_of(obj);
  const double g_bar = obj.value(xbar);
  const Window w = tail_window(traj, window_fraction);
  std::vector<double> gaps, grads;
  for (std::size_t n = w.n_lo; n <= w.n_hi; ++n) {
    const Vector& x = traj.records[n].x;
    gaps.push_back(traj.records[n].g_x - g_bar);
    grads.push_back(obj.gradient(x).norm());
  }
  return estimate_loj_exponent(gaps, grads);
}

}  // namespace inertia
