#pragma once

#include <iosfwd>
#include <optional>
#include <span>
#include <string>

#include "json.hpp"

#include "inertia/lyapunov.hpp"
#include "inertia/ode.hpp"
#include "inertia/rates.hpp"
#include "inertia/solver.hpp"

namespace inertia {

// Insertion-ordered so that serialized reports are stable byte-for-byte.
using Json = nlohmann::ordered_json;

// Violation arrays in reports are truncated to this many entries; the full
// count is always reported alongside.
inline constexpr std::size_t kMaxListedViolations = 100;

/// 17 significant digits; "nan", "inf", "-inf" for non-finite values.
std::string format_double(double v);

Json to_json(const Vector& v);
Json to_json(const Violation& v);
Json to_json(const EnergyReport& report);
Json to_json(const GradHBoundsReport& report);
Json to_json(const CompareRow& row);

/// One entry of a rates report. `fit` is absent when the slope could not be
/// fitted (too few usable points).
Json rate_entry_json(const BoundCheck& check, const std::optional<RateFit>& fit,
                     std::optional<double> p);

/// Header n,g_x,g_y,grad_norm_y,gap,E,delta,Delta and one row per record.
/// E, delta and Delta are "nan" at n = 0 where the coefficients are undefined.
void write_trajectory_csv(std::ostream& out, const Trajectory& traj, double lipschitz);

/// Header s,beta,n_compared,sup_distance.
void write_ode_csv(std::ostream& out, std::span<const CompareRow> rows);

/// Quotes a CSV field when it contains a comma, quote or newline.
std::string csv_field(const std::string& text);

}  // namespace inertia
