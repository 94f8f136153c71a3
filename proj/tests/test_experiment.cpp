#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <vector>

#include <fmt/format.h>

#include "doctest.h"

#include "inertia/config.hpp"
#include "inertia/errors.hpp"
#include "inertia/experiment.hpp"
#include "inertia/reports.hpp"

using namespace inertia;
namespace fs = std::filesystem;

namespace {

ExperimentConfig parse(const std::string& text) {
  std::istringstream in(text);
  return parse_config(in);
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "inertia-tests" / name;
  fs::remove_all(dir);
  return dir;
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) out.push_back(line);
  return out;
}

int cli(const std::string& args) {
  const std::string cmd = fmt::format("{} {} >/dev/null 2>&1", INERTIA_CLI_PATH, args);
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST_CASE("empty config yields the defaults") {
  const ExperimentConfig c = parse("");
  CHECK(c.objective_id == "quadratic:dim=10:cond=100");
  CHECK(c.alpha == 3.0);
  CHECK(c.beta == 0.5);
  CHECK(c.step_fraction == 0.8);
  CHECK(c.monitor_enabled(Monitor::lyapunov));
  CHECK_FALSE(c.monitor_enabled(Monitor::rates));
  CHECK_FALSE(c.sweep_alpha.has_value());
}

TEST_CASE("config values parse into their fields") {
  const ExperimentConfig c = parse(R"(
[objective]
id = power:q=4
[params]
alpha = 5
beta = 0.25
step = 0.1
[start]
x0 = 0.5
seed = 9
[stop]
max_iter = 1234
[monitors]
enabled = rates, ode-compare
[rates]
theta = 0.75
[sweep]
alpha = 1, 3
beta =
[output]
workers = 4
)");
  CHECK(c.objective_id == "power:q=4");
  CHECK(c.alpha == 5.0);
  CHECK(c.beta == 0.25);
  CHECK(c.step.value() == 0.1);
  CHECK(c.x0 == "0.5");
  CHECK(c.seed == 9);
  CHECK(c.stop.max_iter == 1234);
  CHECK(c.monitor_enabled(Monitor::ode_compare));
  CHECK_FALSE(c.monitor_enabled(Monitor::gradH));
  CHECK(c.theta.value() == 0.75);
  CHECK(c.sweep_alpha.value() == std::vector<double>{1.0, 3.0});
  CHECK(c.sweep_beta.value().empty());
  CHECK(c.workers == 4);
  CHECK(c.echo.front().first == "objective.id");
}

TEST_CASE("rendered config parses back to the same values") {
  ExperimentConfig c = parse("[params]\nbeta = 0.3\n[rates]\ntheta = 0.6\n[sweep]\nbeta = 0.1, 0.2\n");
  c.ode_gamma = 0.1 + 0.2;
  const ExperimentConfig back = parse(render_config(c));
  CHECK(back.beta == c.beta);
  CHECK(back.theta == c.theta);
  CHECK(back.ode_gamma == c.ode_gamma);
  CHECK(back.sweep_beta == c.sweep_beta);
  CHECK(render_config(back) == render_config(c));
  CHECK(parse(default_config_text()).alpha == 3.0);
}

TEST_CASE("malformed configs are config errors") {
  for (const char* text : {"[params]\nalpha = abc\n", "[params]\ngamma = 1\n", "[nope]\nx = 1\n",
                           "[rates]\ntheta = 1.2\n", "[rates]\ntheta = 0\n",
                           "[monitors]\nenabled = energy\n", "[ode]\nvariant = stiff\n",
                           "orphan = 1\n", "[params\n", "[output]\nworkers = -1\n"}) {
    CAPTURE(text);
    CHECK_THROWS_AS(parse(text), ConfigError);
  }
  CHECK_THROWS_AS(load_config("/nonexistent/inertia.ini"), ConfigError);
}

TEST_CASE("parameter and start resolution") {
  const Objective obj = make_objective("quadratic:dim=10:cond=100");
  ExperimentConfig c;
  CHECK(resolve_params(c, obj).step == doctest::Approx(0.8));
  c.step = 1.0;
  CHECK_THROWS_AS(resolve_params(c, obj), ConfigError);
  c.step = 0.3;
  CHECK(resolve_params(c, obj).step == 0.3);

  c.x0 = "zeros";
  CHECK(resolve_start(c, obj).norm() == 0.0);
  c.x0 = "random";
  c.seed = 5;
  const Vector a = resolve_start(c, obj);
  CHECK(a == resolve_start(c, obj));
  CHECK(obj.box.contains(a));
  c.x0 = "1, 2";
  CHECK_THROWS_AS(resolve_start(c, obj), ConfigError);
}

TEST_CASE("run writes reproducible artifacts with the report schema") {
  ExperimentConfig c;
  c.output_dir = scratch("run-a");
  std::ostringstream log;
  REQUIRE(cmd_run(c, log) == kExitOk);
  const std::string first = slurp(c.output_dir / "trajectory.csv");
  CHECK(lines(first).front() == "n,g_x,g_y,grad_norm_y,gap,E,delta,Delta");
  CHECK(fs::exists(c.output_dir / "config_echo.ini"));
  CHECK(fs::exists(c.output_dir / "plot_trajectory.py"));

  c.output_dir = scratch("run-b");
  REQUIRE(cmd_run(c, log) == kExitOk);
  CHECK(slurp(c.output_dir / "trajectory.csv") == first);

  const Json report = Json::parse(slurp(c.output_dir / "report.json"));
  for (const char* key : {"schema_version", "command", "objective", "params", "x0", "config",
                          "termination", "iterations", "final", "monitors", "pass"}) {
    CAPTURE(key);
    CHECK(report.contains(key));
  }
  CHECK(report["termination"] == "gradient-tolerance");
  CHECK(report["pass"] == true);
  CHECK(report["monitors"]["lyapunov"]["status"] == "pass");
  CHECK(report["monitors"]["gradH"]["status"] == "pass");
  CHECK(report["monitors"]["rates"]["status"] == "disabled");
  CHECK(report["params"]["step_bound"].get<double>() == doctest::Approx(1.0));
  CHECK(lines(first).size() == report["iterations"].get<std::size_t>() + 2);
}

TEST_CASE("run exit codes") {
  std::ostringstream log;
  ExperimentConfig c;
  c.output_dir = scratch("run-codes");
  c.step = 1.0;
  CHECK(cmd_run(c, log) == kExitConfig);
  CHECK(log.str().find("2(1-beta)/L_g") != std::string::npos);
  c.step.reset();
  c.objective_id = "nope";
  CHECK(cmd_run(c, log) == kExitConfig);
  c.objective_id = "rosenbrock";
  c.stop.max_iter = 50;
  CHECK(cmd_run(c, log) == kExitFailure);
  c.objective_id = "quadratic:dim=10:cond=100";
  c.stop.max_iter = 100000;
  c.monitors = {Monitor::rates};
  c.theta = 0.5;
  CHECK(cmd_run(c, log) == kExitOk);
}

TEST_CASE("sweep covers the grid in order") {
  ExperimentConfig c;
  c.output_dir = scratch("sweep");
  c.sweep_alpha = std::vector{1.0, 3.0, 10.0};
  c.sweep_beta = std::vector{0.3, 0.5, 0.8};
  c.workers = 3;
  std::ostringstream log;
  CHECK(cmd_sweep(c, log) == kExitOk);
  const auto rows = lines(slurp(c.output_dir / "summary.csv"));
  REQUIRE(rows.size() == 10);
  CHECK(rows[0].rfind("index,objective,alpha,beta", 0) == 0);
  CHECK(rows[1].rfind("0,quadratic:dim=10:cond=100,1,0.29999999999999999,", 0) == 0);
  CHECK(rows[9].rfind("8,quadratic:dim=10:cond=100,10,0.80000000000000004,", 0) == 0);
  for (std::size_t i = 1; i < rows.size(); ++i) CHECK(rows[i].find(",ok,") != std::string::npos);

  c.output_dir = scratch("sweep-empty");
  c.sweep_alpha = std::vector<double>{};
  CHECK(cmd_sweep(c, log) == kExitOk);
  CHECK(lines(slurp(c.output_dir / "summary.csv")).size() == 1);

  c.output_dir = scratch("sweep-bad");
  c.sweep_alpha.reset();
  c.sweep_beta = std::vector{0.5, 1.0};
  CHECK(cmd_sweep(c, log) == kExitConfig);
}

TEST_CASE("rates command on the quartic power") {
  ExperimentConfig c;
  c.objective_id = "power:q=4";
  c.output_dir = scratch("rates");
  std::ostringstream log;
  CHECK(cmd_rates(c, log) == kExitOk);
  const Json out = Json::parse(slurp(c.output_dir / "rates.json"));
  CHECK(out["pass"] == true);
  bool saw_value = false;
  for (const auto& e : out["reports"]) {
    if (e["quantity"] != "value_gap_y") continue;
    saw_value = true;
    CHECK(e["exponent_predicted"].get<double>() == doctest::Approx(2.0));
    CHECK(std::abs(e["slope_fitted"].get<double>() + 2.0) <= 0.3);
  }
  CHECK(saw_value);

  c.objective_id = "power:q=5";
  CHECK(cmd_rates(c, log) == kExitConfig);
}

TEST_CASE("ode-compare writes a decreasing ladder") {
  ExperimentConfig c;
  c.output_dir = scratch("ode");
  std::ostringstream log;
  CHECK(cmd_ode(c, log) == kExitOk);
  const auto rows = lines(slurp(c.output_dir / "ode_compare.csv"));
  REQUIRE(rows.size() == 4);
  CHECK(rows[0] == "s,beta,n_compared,sup_distance");
  c.ode_gamma = 10.0;
  CHECK(cmd_ode(c, log) == kExitConfig);
}

TEST_CASE("list and gradient check commands") {
  std::ostringstream out;
  CHECK(cmd_list_objectives(out) == kExitOk);
  CHECK(out.str().find("rosenbrock") != std::string::npos);
  CHECK(cmd_check_gradients(ExperimentConfig{}, out) == kExitOk);
}

TEST_CASE("command-line exit codes") {
  const fs::path dir = scratch("cli");
  fs::create_directories(dir);
  CHECK(cli(fmt::format("run --out {}", (dir / "ok").string())) == 0);
  CHECK(fs::exists(dir / "ok" / "report.json"));

  std::ofstream(dir / "bad.ini") << "[params]\nstep = 1\n";
  CHECK(cli(fmt::format("run --config {} --out {}", (dir / "bad.ini").string(),
                        (dir / "bad").string())) == 2);
  std::ofstream(dir / "typo.ini") << "[parms]\nalpha = 1\n";
  CHECK(cli(fmt::format("run --config {}", (dir / "typo.ini").string())) == 2);
  CHECK(cli("run --no-such-flag") == 2);
  CHECK(cli("list-objectives") == 0);
  CHECK(cli("default-config") == 0);
}
