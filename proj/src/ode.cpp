#include "inertia/ode.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "inertia/errors.hpp"
#include "inertia/solver.hpp"

namespace inertia {

std::string_view to_string(OdeVariant v) { return v == OdeVariant::avd ? "avd" : "damped"; }

OdeVariant parse_ode_variant(std::string_view name) {
  if (name == "avd") return OdeVariant::avd;
  if (name == "damped") return OdeVariant::damped;
  throw InputError(fmt::format("unknown ODE variant '{}' (expected avd or damped)", name));
}

namespace {

struct State {
  Vector x;
  Vector v;
};

double damping(const OdeSpec& spec, double t) {
  const double gamma = spec.variant == OdeVariant::damped ? spec.gamma : 0.0;
  return gamma + spec.alpha / t;
}

State derivative(const OdeSpec& spec, const Objective& obj, double t, const State& s) {
  return {s.v, -damping(spec, t) * s.v - obj.gradient(s.x)};
}

}  // namespace

std::vector<OdeSample> integrate(const OdeSpec& spec, const Objective& obj, double t_end,
                                 double dt) {
  if (!(spec.t0 > 0.0)) throw DomainError("integrate: t0 must be > 0");
  if (!(t_end > spec.t0)) throw DomainError("integrate: t_end must exceed t0");
  if (!(dt > 0.0)) throw DomainError("integrate: dt must be > 0");
  if (spec.alpha <= 0.0) throw DomainError("integrate: alpha must be > 0");
  if (spec.variant == OdeVariant::damped && spec.gamma < 0.0) {
    throw DomainError("integrate: gamma must be >= 0");
  }
  if (spec.x0.size() != obj.dim || spec.v0.size() != obj.dim) {
    throw InputError("integrate: initial state does not match the objective dimension");
  }

  const auto steps = static_cast<std::size_t>(std::floor((t_end - spec.t0) / dt * (1.0 + 1e-9)));
  std::vector<OdeSample> out;
  out.reserve(steps + 1);
  State s{spec.x0, spec.v0};
  out.push_back({spec.t0, s.x, s.v});
  for (std::size_t k = 0; k < steps; ++k) {
    const double t = spec.t0 + static_cast<double>(k) * dt;
    const State k1 = derivative(spec, obj, t, s);
    const State k2 =
        derivative(spec, obj, t + 0.5 * dt, {s.x + 0.5 * dt * k1.x, s.v + 0.5 * dt * k1.v});
    const State k3 =
        derivative(spec, obj, t + 0.5 * dt, {s.x + 0.5 * dt * k2.x, s.v + 0.5 * dt * k2.v});
    const State k4 = derivative(spec, obj, t + dt, {s.x + dt * k3.x, s.v + dt * k3.v});
    s.x += dt / 6.0 * (k1.x + 2.0 * k2.x + 2.0 * k3.x + k4.x);
    s.v += dt / 6.0 * (k1.v + 2.0 * k2.v + 2.0 * k3.v + k4.v);
    if (!s.x.allFinite() || !s.v.allFinite()) {
      throw DivergenceError(fmt::format("ODE state became non-finite near t = {}", t + dt), s.x);
    }
    out.push_back({spec.t0 + static_cast<double>(k + 1) * dt, s.x, s.v});
  }
  return out;
}

double self_convergence_order(const OdeSpec& spec, const Objective& obj, double t_end,
                              double dt) {
  const auto final_state = [&](double h) {
    const OdeSample last = integrate(spec, obj, t_end, h).back();
    Vector z(2 * obj.dim);
    z << last.x, last.v;
    return z;
  };
  const Vector reference = final_state(dt / 16.0);
  const double e1 = (final_state(dt) - reference).norm();
  const double e2 = (final_state(dt / 2.0) - reference).norm();
  if (!(e1 > 0.0 && e2 > 0.0)) {
    throw DegenerateFitError("self-convergence: solutions coincide with the reference");
  }
  return std::log2(e1 / e2);
}

double matched_beta(OdeVariant variant, double gamma, double s) {
  return variant == OdeVariant::avd ? 1.0 - gamma * s : 1.0 - gamma * std::sqrt(s);
}

std::vector<CompareRow> compare_discrete_continuous(const Objective& obj, double gamma,
                                                    double alpha, std::span<const double> s_list,
                                                    OdeVariant variant,
                                                    const CompareOptions& options) {
  if (!(gamma > 0.0)) throw ConfigError("compare: gamma must be > 0");
  if (options.match_index < 1) throw ConfigError("compare: match index must be >= 1");
  if (options.substeps < 1) throw ConfigError("compare: substeps must be >= 1");
  const Vector x0 = options.x0.size() > 0 ? options.x0 : obj.default_start;

  // Validate the whole ladder before doing any work.
  for (double s : s_list) {
    const InertialParams params{alpha, matched_beta(variant, gamma, s), s};
    try {
      validate(params, obj.lipschitz);
    } catch (const ConfigError& e) {
      throw ConfigError(fmt::format("s = {}: {}", s, e.what()));
    }
  }

  std::vector<CompareRow> rows;
  for (double s : s_list) {
    const InertialParams params{alpha, matched_beta(variant, gamma, s), s};
    const double rs = std::sqrt(s);
    const auto n_end = static_cast<std::size_t>(std::floor(options.t_end / rs * (1.0 + 1e-12)));
    const std::size_t n0 = options.match_index;
    if (n_end <= n0) {
      throw ConfigError(fmt::format("s = {}: horizon t_end = {} ends before the match index",
                                    s, options.t_end));
    }

    std::vector<Vector> xs;
    xs.reserve(n_end + 1);
    xs.push_back(x0);
    Vector prev = x0;
    for (std::size_t n = 0; n < n_end; ++n) {
      InertialStep st = step_inertial(xs.back(), prev, n, params, obj);
      prev = xs.back();
      xs.push_back(std::move(st.x_next));
    }

    OdeSpec spec;
    spec.variant = variant;
    spec.alpha = alpha;
    spec.gamma = gamma;
    spec.t0 = static_cast<double>(n0) * rs;
    spec.x0 = xs[n0];
    spec.v0 = (xs[n0] - xs[n0 - 1]) / rs;
    const double dt = rs / options.substeps;
    const auto samples = integrate(spec, obj, static_cast<double>(n_end) * rs, dt);

    CompareRow row;
    row.s = s;
    row.beta = params.beta;
    for (std::size_t n = n0; n <= n_end; ++n) {
      const std::size_t k = (n - n0) * static_cast<std::size_t>(options.substeps);
      if (k >= samples.size()) break;
      row.sup_distance = std::max(row.sup_distance, (xs[n] - samples[k].x).norm());
      ++row.n_compared;
    }
    rows.push_back(row);
  }
  return rows;
}

}  // namespace inertia
