#include "inertia/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>
#include <thread>

#include <fmt/format.h>

#include "inertia/errors.hpp"

namespace inertia {

namespace fs = std::filesystem;

namespace {

Json monitor_head(bool enabled, std::string_view status, bool pass) {
  Json out;
  out["enabled"] = enabled;
  out["status"] = status;
  out["pass"] = pass;
  out["violations"] = Json::array();
  return out;
}

Json disabled_monitor() { return monitor_head(false, "disabled", true); }

Json skipped_monitor(const std::string& reason) {
  Json out = monitor_head(true, "skipped", true);
  out["reason"] = reason;
  return out;
}

Json errored_monitor(const std::string& reason) {
  Json out = monitor_head(true, "error", false);
  out["reason"] = reason;
  return out;
}

Json finished_monitor(Json detail) {
  const bool pass = detail.value("pass", false);
  Json out = monitor_head(true, pass ? "pass" : "fail", pass);
  out.update(detail);
  return out;
}

template <typename F>
Json guarded(F&& body) {
  try {
    return finished_monitor(body());
  } catch (const InsufficientDataError& e) {
    return skipped_monitor(e.what());
  } catch (const Error& e) {
    return errored_monitor(e.what());
  }
}

Objective resolve_objective(const std::string& id) {
  try {
    return make_objective(id);
  } catch (const InputError& e) {
    throw ConfigError(fmt::format("objective '{}': {}", id, e.what()));
  }
}

bool strictly_decreasing(const std::vector<CompareRow>& rows) {
  for (std::size_t i = 1; i < rows.size(); ++i) {
    if (!(rows[i].sup_distance < rows[i - 1].sup_distance)) return false;
  }
  return true;
}

std::vector<CompareRow> ode_rows(const ExperimentConfig& config, const Objective& obj,
                                 const Vector& x0) {
  CompareOptions opts;
  opts.match_index = config.ode_match_index;
  opts.substeps = config.ode_substeps;
  opts.t_end = config.ode_t_end;
  opts.x0 = x0;
  return compare_discrete_continuous(obj, config.ode_gamma, config.ode_alpha.value_or(config.alpha),
                                     config.s_ladder, config.ode_variant, opts);
}

Json ode_json(const ExperimentConfig& config, const std::vector<CompareRow>& rows) {
  Json out;
  out["pass"] = strictly_decreasing(rows);
  out["variant"] = to_string(config.ode_variant);
  out["gamma"] = config.ode_gamma;
  Json list = Json::array();
  for (const auto& r : rows) list.push_back(to_json(r));
  out["rows"] = std::move(list);
  Json violations = Json::array();
  for (std::size_t i = 1; i < rows.size(); ++i) {
    if (!(rows[i].sup_distance < rows[i - 1].sup_distance)) {
      violations.push_back(to_json(Violation{i, rows[i].sup_distance, rows[i - 1].sup_distance, 0.0}));
    }
  }
  out["violations"] = std::move(violations);
  return out;
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
  if (!out) throw Error(fmt::format("cannot write '{}'", path.string()));
}

void prepare_output(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) {
    throw ConfigError(fmt::format("output directory '{}' is not writable", dir.string()));
  }
}

constexpr const char* kPlotStub = R"(# Plot helper for trajectory.csv. Usage: python3 plot_trajectory.py [DIR]
import csv, sys, os
import matplotlib.pyplot as plt

root = sys.argv[1] if len(sys.argv) > 1 else os.path.dirname(__file__)
with open(os.path.join(root, "trajectory.csv")) as fh:
    rows = list(csv.DictReader(fh))
n = [int(r["n"]) for r in rows[1:]]
fig, ax = plt.subplots(1, 2, figsize=(10, 4))
for col in ("gap", "grad_norm_y"):
    ax[0].loglog(n, [float(r[col]) for r in rows[1:]], label=col)
ax[0].legend()
ax[1].semilogx(n, [float(r["E"]) for r in rows[1:]], label="E")
ax[1].semilogx(n, [float(r["g_y"]) for r in rows[1:]], label="g_y")
ax[1].legend()
fig.tight_layout()
fig.savefig(os.path.join(root, "trajectory.png"))
)";

}  // namespace

Json rates_report(const ExperimentConfig& config, const Objective& obj, const Trajectory& traj) {
  const std::optional<double> theta = config.theta ? config.theta : obj.known_loj_exponent;
  if (!theta) {
    throw ConfigError(fmt::format(
        "objective '{}' has no known exponent; set [rates] theta", obj.id));
  }
  if (!obj.known_critical_point) {
    throw ConfigError(fmt::format("objective '{}' has no known critical point", obj.id));
  }
  std::vector<RatePrediction> predictions;
  try {
    if (*theta <= 0.5) {
      for (double p : config.rate_orders) predictions.push_back(predict(*theta, p));
    } else {
      predictions.push_back(predict(*theta));
    }
  } catch (const DomainError& e) {
    throw ConfigError(e.what());
  }

  const std::size_t N = critical_index(traj.params, obj.lipschitz);
  const std::size_t n_start = N + config.rate_margin;
  Json out;
  bool pass = true;
  Json entries = Json::array();
  for (const auto& pred : predictions) {
    for (RateQuantity q : {RateQuantity::value_gap_y, RateQuantity::iterate_dist}) {
      std::optional<RateFit> fit;
      try {
        fit = fit_rate(traj, obj, q, config.rate_window);
      } catch (const Error&) {
      }
      try {
        const BoundCheck check = check_bound(traj, obj, pred, q, n_start);
        pass = pass && check.holds;
        entries.push_back(rate_entry_json(check, fit, pred.p));
      } catch (const Error& e) {
        pass = false;
        Json entry;
        entry["quantity"] = to_string(q);
        entry["p"] = pred.p ? Json(*pred.p) : Json(nullptr);
        entry["exponent_predicted"] = predicted_exponent(pred, q);
        entry["holds"] = false;
        entry["error"] = e.what();
        entries.push_back(std::move(entry));
      }
    }
  }
  out["pass"] = pass;
  out["theta"] = *theta;
  out["regime"] = to_string(predictions.empty() ? (*theta <= 0.5 ? RateRegime::fast
                                                                  : RateRegime::slow)
                                                : predictions.front().regime);
  out["critical_index"] = N;
  out["n_start"] = n_start;
  out["reports"] = std::move(entries);
  try {
    out["theta_hat"] = estimate_loj_exponent(obj, traj, config.rate_window);
  } catch (const Error&) {
    out["theta_hat"] = nullptr;
  }
  Json violations = Json::array();
  for (const auto& entry : out["reports"]) {
    if (!entry.value("holds", false)) {
      violations.push_back(Json{{"quantity", entry["quantity"]}, {"p", entry["p"]}});
    }
  }
  out["violations"] = std::move(violations);
  return out;
}

MonitoredRun execute(const ExperimentConfig& config) {
  MonitoredRun r;
  r.objective = resolve_objective(config.objective_id);
  r.params = resolve_params(config, r.objective);
  r.x0 = resolve_start(config, r.objective);
  if (config.monitor_enabled(Monitor::rates) && !config.theta &&
      !r.objective.known_loj_exponent) {
    throw ConfigError(fmt::format(
        "rates monitor: objective '{}' has no known exponent; set [rates] theta",
        r.objective.id));
  }
  r.trajectory = run(r.objective, r.params, r.x0, config.stop);

  const Objective& obj = r.objective;
  const Trajectory& traj = r.trajectory;
  r.monitors = Json::object();
  r.monitors["lyapunov"] = config.monitor_enabled(Monitor::lyapunov)
                               ? guarded([&] { return to_json(instrument(traj, obj)); })
                               : disabled_monitor();
  r.monitors["gradH"] = config.monitor_enabled(Monitor::gradH)
                            ? guarded([&] { return to_json(check_gradH_bounds(traj, obj)); })
                            : disabled_monitor();
  r.monitors["rates"] = config.monitor_enabled(Monitor::rates)
                            ? guarded([&] { return rates_report(config, obj, traj); })
                            : disabled_monitor();
  if (config.monitor_enabled(Monitor::ode_compare)) {
    // A bad ladder is a configuration problem, not a failed check.
    const auto rows = ode_rows(config, obj, r.x0);
    r.monitors["ode-compare"] = finished_monitor(ode_json(config, rows));
  } else {
    r.monitors["ode-compare"] = disabled_monitor();
  }
  for (const auto& [name, entry] : r.monitors.items()) {
    r.monitors_pass = r.monitors_pass && entry.value("pass", false);
  }
  return r;
}

Json run_report(const ExperimentConfig& config, const MonitoredRun& run) {
  const Trajectory& traj = run.trajectory;
  const IterateRecord& last = traj.records.back();
  Json out;
  out["schema_version"] = 1;
  out["command"] = "run";
  out["objective"] = Json{{"id", run.objective.id},
                          {"dim", run.objective.dim},
                          {"lipschitz", run.objective.lipschitz},
                          {"known_loj_exponent", run.objective.known_loj_exponent
                                                     ? Json(*run.objective.known_loj_exponent)
                                                     : Json(nullptr)}};
  out["params"] = Json{{"alpha", run.params.alpha},
                       {"beta", run.params.beta},
                       {"step", run.params.step},
                       {"step_bound", step_bound(run.params.beta, run.objective.lipschitz)}};
  out["x0"] = to_json(run.x0);
  Json given = Json::object();
  for (const auto& [key, value] : config.echo) given[key] = value;
  out["config"] = Json{{"given", std::move(given)}, {"effective", render_config(config)}};
  out["termination"] = to_string(traj.termination);
  out["iterations"] = last.n;
  out["final"] = Json{{"x", to_json(last.x)},
                      {"y", to_json(last.y)},
                      {"g_x", last.g_x},
                      {"g_y", last.g_y},
                      {"grad_norm_y", last.grad_norm_y},
                      {"gap", last.gap},
                      {"critical_point_distance",
                       run.objective.distance_to_critical_set(traj.final_point())}};
  out["monitors"] = run.monitors;
  out["pass"] = run.ok();
  return out;
}

int cmd_run(const ExperimentConfig& config, std::ostream& log) {
  try {
    prepare_output(config.output_dir);
    const MonitoredRun r = execute(config);
    const fs::path dir = config.output_dir;
    std::ostringstream csv;
    write_trajectory_csv(csv, r.trajectory, r.objective.lipschitz);
    write_file(dir / "trajectory.csv", csv.str());
    write_file(dir / "report.json", run_report(config, r).dump(2) + "\n");
    write_file(dir / "config_echo.ini", render_config(config));
    write_file(dir / "plot_trajectory.py", kPlotStub);

    log << fmt::format("{}: {} after {} iterations, |grad g(y)| = {:.3e}, monitors {}\n",
                       r.objective.id, to_string(r.trajectory.termination),
                       r.trajectory.records.back().n, r.trajectory.records.back().grad_norm_y,
                       r.monitors_pass ? "pass" : "FAIL");
    return r.ok() ? kExitOk : kExitFailure;
  } catch (const ConfigError& e) {
    log << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const Error& e) {
    log << "error: " << e.what() << '\n';
    return kExitFailure;
  }
}

namespace {

struct GridPoint {
  std::string objective;
  double alpha;
  double beta;
  double fraction;
};

struct SweepRow {
  GridPoint point;
  double step = NAN;
  std::string termination;
  std::size_t iterations = 0;
  double final_gap = NAN;
  double final_grad = NAN;
  std::string lyapunov = "-";
  std::string gradH = "-";
  double rate_slope = NAN;
  bool ok = false;
  std::string error;
};

std::vector<GridPoint> build_grid(const ExperimentConfig& config) {
  const auto objectives = config.sweep_objective.value_or(std::vector{config.objective_id});
  const auto alphas = config.sweep_alpha.value_or(std::vector{config.alpha});
  const auto betas = config.sweep_beta.value_or(std::vector{config.beta});
  const auto fractions = config.sweep_s_fraction.value_or(std::vector{config.step_fraction});

  for (const auto& id : objectives) resolve_objective(id);
  for (double a : alphas) {
    if (!(a > 0.0)) throw ConfigError(fmt::format("sweep alpha = {} violates alpha > 0", a));
  }
  for (double b : betas) {
    if (!(b > 0.0 && b < 1.0)) {
      throw ConfigError(fmt::format("sweep beta = {} violates 0 < beta < 1", b));
    }
  }
  for (double f : fractions) {
    if (!(f > 0.0 && f < 1.0)) {
      throw ConfigError(fmt::format("sweep s_fraction = {} violates 0 < fraction < 1", f));
    }
  }

  std::vector<GridPoint> grid;
  for (const auto& id : objectives)
    for (double a : alphas)
      for (double b : betas)
        for (double f : fractions) grid.push_back({id, a, b, f});
  return grid;
}

SweepRow sweep_point(const ExperimentConfig& base, const GridPoint& point) {
  SweepRow row;
  row.point = point;
  ExperimentConfig cfg = base;
  cfg.objective_id = point.objective;
  cfg.alpha = point.alpha;
  cfg.beta = point.beta;
  cfg.step = std::nullopt;
  cfg.step_fraction = point.fraction;
  try {
    const MonitoredRun r = execute(cfg);
    const IterateRecord& last = r.trajectory.records.back();
    row.step = r.params.step;
    row.termination = std::string(to_string(r.trajectory.termination));
    row.iterations = last.n;
    row.final_gap = last.gap;
    row.final_grad = last.grad_norm_y;
    row.lyapunov = r.monitors["lyapunov"]["status"].get<std::string>();
    row.gradH = r.monitors["gradH"]["status"].get<std::string>();
    if (r.objective.known_critical_point) {
      try {
        row.rate_slope =
            fit_rate(r.trajectory, r.objective, RateQuantity::value_gap_y, cfg.rate_window).slope;
      } catch (const Error&) {
      }
    }
    row.ok = r.ok();
    if (!r.converged()) row.error = "did not reach the gradient tolerance";
    else if (!r.monitors_pass) row.error = "monitor check failed";
  } catch (const Error& e) {
    row.ok = false;
    row.error = e.what();
  }
  return row;
}

}  // namespace

int cmd_sweep(const ExperimentConfig& config, std::ostream& log) {
  std::vector<GridPoint> grid;
  try {
    prepare_output(config.output_dir);
    grid = build_grid(config);
  } catch (const ConfigError& e) {
    log << "config error: " << e.what() << '\n';
    return kExitConfig;
  }

  std::vector<SweepRow> rows(grid.size());
  std::atomic<std::size_t> next{0};
  const auto worker = [&] {
    for (std::size_t i = next++; i < grid.size(); i = next++) rows[i] = sweep_point(config, grid[i]);
  };
  const std::size_t threads = std::min<std::size_t>(std::max(1u, config.workers), grid.size());
  std::vector<std::thread> pool;
  for (std::size_t t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  std::ostringstream csv;
  csv << "index,objective,alpha,beta,s_fraction,step,termination,iterations,final_gap,"
         "final_grad_norm,lyapunov,gradH,rate_slope,status,error\n";
  std::size_t failed = 0;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const SweepRow& r = rows[i];
    if (!r.ok) ++failed;
    csv << i << ',' << csv_field(r.point.objective) << ',' << format_double(r.point.alpha) << ','
        << format_double(r.point.beta) << ',' << format_double(r.point.fraction) << ','
        << format_double(r.step) << ',' << r.termination << ',' << r.iterations << ','
        << format_double(r.final_gap) << ',' << format_double(r.final_grad) << ',' << r.lyapunov
        << ',' << r.gradH << ',' << format_double(r.rate_slope) << ','
        << (r.ok ? "ok" : "failed") << ',' << csv_field(r.error) << '\n';
  }
  try {
    write_file(config.output_dir / "summary.csv", csv.str());
    write_file(config.output_dir / "config_echo.ini", render_config(config));
  } catch (const Error& e) {
    log << "error: " << e.what() << '\n';
    return kExitFailure;
  }
  log << fmt::format("sweep: {} grid points, {} failed\n", rows.size(), failed);
  return failed == 0 ? kExitOk : kExitFailure;
}

int cmd_rates(const ExperimentConfig& config, std::ostream& log) {
  try {
    prepare_output(config.output_dir);
    ExperimentConfig plain = config;
    plain.monitors.clear();
    const Objective obj = resolve_objective(config.objective_id);
    if (!config.theta && !obj.known_loj_exponent) {
      throw ConfigError(
          fmt::format("objective '{}' has no known exponent; set [rates] theta", obj.id));
    }
    const MonitoredRun r = execute(plain);
    Json out;
    out["schema_version"] = 1;
    out["command"] = "rates";
    out["objective"] = obj.id;
    out["params"] = Json{{"alpha", r.params.alpha}, {"beta", r.params.beta}, {"step", r.params.step}};
    out["termination"] = to_string(r.trajectory.termination);
    out["iterations"] = r.trajectory.records.back().n;
    out.update(rates_report(config, r.objective, r.trajectory));
    write_file(config.output_dir / "rates.json", out.dump(2) + "\n");
    write_file(config.output_dir / "config_echo.ini", render_config(config));

    const bool pass = out["pass"].get<bool>();
    for (const auto& e : out["reports"]) {
      log << fmt::format("{:<13} p={:<5} predicted -{:.4f}  fitted {:>8}  holds={}\n",
                         e["quantity"].get<std::string>(),
                         e["p"].is_null() ? std::string("-") : e["p"].dump(),
                         e["exponent_predicted"].get<double>(),
                         e.contains("slope_fitted") && !e["slope_fitted"].is_null()
                             ? fmt::format("{:.4f}", e["slope_fitted"].get<double>())
                             : std::string("n/a"),
                         e["holds"].get<bool>());
    }
    return pass ? kExitOk : kExitFailure;
  } catch (const ConfigError& e) {
    log << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const Error& e) {
    log << "error: " << e.what() << '\n';
    return kExitFailure;
  }
}

int cmd_ode(const ExperimentConfig& config, std::ostream& log) {
  try {
    prepare_output(config.output_dir);
    const Objective obj = resolve_objective(config.objective_id);
    const auto rows = ode_rows(config, obj, resolve_start(config, obj));
    std::ostringstream csv;
    write_ode_csv(csv, rows);
    write_file(config.output_dir / "ode_compare.csv", csv.str());
    write_file(config.output_dir / "config_echo.ini", render_config(config));
    for (const auto& r : rows) {
      log << fmt::format("s = {:<10g} beta = {:<10g} D(s) = {:.6e} over {} steps\n", r.s, r.beta,
                         r.sup_distance, r.n_compared);
    }
    const bool ok = strictly_decreasing(rows);
    if (!ok) log << "sup distance is not strictly decreasing down the ladder\n";
    return ok ? kExitOk : kExitFailure;
  } catch (const ConfigError& e) {
    log << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const Error& e) {
    log << "error: " << e.what() << '\n';
    return kExitFailure;
  }
}

int cmd_list_objectives(std::ostream& out) {
  out << objective_id_grammar() << "\n\n";
  out << fmt::format("{:<28} {:>4} {:>12} {:>8}  {}\n", "id", "dim", "L_g", "theta", "start");
  for (const Objective& obj : builtin_corpus()) {
    std::string start;
    for (Eigen::Index i = 0; i < obj.default_start.size(); ++i) {
      start += fmt::format("{}{:g}", i ? ", " : "", obj.default_start(i));
    }
    out << fmt::format("{:<28} {:>4} {:>12g} {:>8}  ({})\n", obj.id, obj.dim, obj.lipschitz,
                       obj.known_loj_exponent ? fmt::format("{:g}", *obj.known_loj_exponent)
                                              : std::string("-"),
                       start);
  }
  return kExitOk;
}

int cmd_check_gradients(const ExperimentConfig& config, std::ostream& out) {
  std::vector<Objective> objs = builtin_corpus();
  const bool listed = std::any_of(objs.begin(), objs.end(),
                                  [&](const Objective& o) { return o.id == config.objective_id; });
  try {
    if (!listed) objs.push_back(resolve_objective(config.objective_id));
  } catch (const ConfigError& e) {
    out << "config error: " << e.what() << '\n';
    return kExitConfig;
  }
  bool all = true;
  for (const Objective& obj : objs) {
    const auto points = sample_box(obj, 100, config.seed);
    const GradientCheckReport rep = check_gradient(obj, points);
    all = all && rep.passed();
    out << fmt::format("{:<28} max rel err {:.3e}  max abs err {:.3e}  {}\n", obj.id,
                       rep.max_rel_error, rep.max_abs_error, rep.passed() ? "ok" : "FAIL");
  }
  return all ? kExitOk : kExitFailure;
}

}  // namespace inertia
