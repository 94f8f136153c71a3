#include "inertia/reports.hpp"

#include <cmath>
#include <ostream>

#include <fmt/format.h>

namespace inertia {

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return fmt::format("{:.17g}", v);
}

Json to_json(const Vector& v) {
  Json out = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

Json to_json(const Violation& v) {
  return Json{{"n", v.n}, {"lhs", v.lhs}, {"rhs", v.rhs}, {"slack", v.slack}};
}

namespace {

Json violation_list(std::span<const Violation> all, const char* bound = nullptr) {
  Json out = Json::array();
  for (std::size_t i = 0; i < all.size() && i < kMaxListedViolations; ++i) {
    Json v = to_json(all[i]);
    if (bound) v["bound"] = bound;
    out.push_back(std::move(v));
  }
  return out;
}

}  // namespace

Json to_json(const EnergyReport& report) {
  Json out;
  out["pass"] = report.passed();
  out["critical_index"] = report.critical_index;
  out["tolerance"] = report.tolerance;
  out["checked"] = report.records.empty() ? 0 : report.records.size() - report.critical_index;
  out["empirical_D"] = report.empirical_D;
  out["violation_count"] = report.violations.size();
  out["violations"] = violation_list(report.violations);
  return out;
}

Json to_json(const GradHBoundsReport& report) {
  Json out;
  out["pass"] = report.passed();
  out["n_start"] = report.n_start;
  out["checked"] = report.checked;
  out["worst_ratio"] = report.worst_ratio();
  out["worst_ratio_linear"] = report.worst_ratio_linear;
  out["worst_ratio_quadratic"] = report.worst_ratio_quadratic;
  out["worst_n"] = report.worst_n;
  out["violation_count"] = report.violations_linear.size() + report.violations_quadratic.size();
  Json list = violation_list(report.violations_linear, "linear");
  for (auto& v : violation_list(report.violations_quadratic, "quadratic")) {
    if (list.size() >= kMaxListedViolations) break;
    list.push_back(std::move(v));
  }
  out["violations"] = std::move(list);
  return out;
}

Json to_json(const CompareRow& row) {
  return Json{{"s", row.s},
              {"beta", row.beta},
              {"n_compared", row.n_compared},
              {"sup_distance", row.sup_distance}};
}

Json rate_entry_json(const BoundCheck& check, const std::optional<RateFit>& fit,
                     std::optional<double> p) {
  Json out;
  out["quantity"] = to_string(check.quantity);
  out["p"] = p ? Json(*p) : Json(nullptr);
  out["exponent_predicted"] = check.exponent;
  out["slope_fitted"] = fit ? Json(fit->slope) : Json(nullptr);
  out["r2"] = fit ? Json(fit->r_squared) : Json(nullptr);
  out["fit_window"] = fit ? Json::array({fit->n_lo, fit->n_hi}) : Json(nullptr);
  out["holds"] = check.holds;
  out["constant"] = check.fitted_constant;
  out["first_half_constant"] = check.first_half_constant;
  out["worst_n"] = check.worst_n;
  out["range"] = Json::array({check.n_start, check.n_end});
  return out;
}

void write_trajectory_csv(std::ostream& out, const Trajectory& traj, double lipschitz) {
  out << "n,g_x,g_y,grad_norm_y,gap,E,delta,Delta\n";
  for (const IterateRecord& r : traj.records) {
    double E = NAN, delta = NAN, Delta = NAN;
    if (r.n >= 1) {
      const CoefficientSet c = coefficients(r.n, traj.params, lipschitz);
      delta = c.delta;
      Delta = c.Delta;
      E = r.g_y + c.delta * r.gap * r.gap;
    }
    out << r.n << ',' << format_double(r.g_x) << ',' << format_double(r.g_y) << ','
        << format_double(r.grad_norm_y) << ',' << format_double(r.gap) << ','
        << format_double(E) << ',' << format_double(delta) << ',' << format_double(Delta)
        << '\n';
  }
}

void write_ode_csv(std::ostream& out, std::span<const CompareRow> rows) {
  out << "s,beta,n_compared,sup_distance\n";
  for (const CompareRow& r : rows) {
    out << format_double(r.s) << ',' << format_double(r.beta) << ',' << r.n_compared << ','
        << format_double(r.sup_distance) << '\n';
  }
}

std::string csv_field(const std::string& text) {
  if (text.find_first_of(",\"\n\r") == std::string::npos) return text;
  std::string out = "\"";
  for (char ch : text) {
    if (ch == '"') out += '"';
    out += ch;
  }
  out += '"';
  return out;
}

}  // namespace inertia
