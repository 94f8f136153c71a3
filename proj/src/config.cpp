#include "inertia/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <random>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <fmt/format.h>
#include <fmt/ranges.h>

#include "inertia/errors.hpp"

namespace inertia {

namespace pt = boost::property_tree;

std::string_view to_string(Monitor m) {
  switch (m) {
    case Monitor::lyapunov:
      return "lyapunov";
    case Monitor::gradH:
      return "gradH";
    case Monitor::rates:
      return "rates";
    case Monitor::ode_compare:
      return "ode-compare";
  }
  return "unknown";
}

Monitor parse_monitor(std::string_view name) {
  for (auto m : {Monitor::lyapunov, Monitor::gradH, Monitor::rates, Monitor::ode_compare}) {
    if (to_string(m) == name) return m;
  }
  throw ConfigError(fmt::format(
      "unknown monitor '{}' (expected lyapunov, gradH, rates or ode-compare)", name));
}

bool ExperimentConfig::monitor_enabled(Monitor m) const {
  return std::find(monitors.begin(), monitors.end(), m) != monitors.end();
}

namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(first, last - first + 1));
}

std::vector<std::string> split_list(const std::string& raw) {
  std::vector<std::string> out;
  if (trim(raw).empty()) return out;
  std::stringstream ss(raw);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(trim(item));
  return out;
}

double to_number(const std::string& key, const std::string& text) {
  const std::string t = trim(text);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (t.empty() || ec != std::errc{} || ptr != t.data() + t.size() || !std::isfinite(v)) {
    throw ConfigError(fmt::format("{}: '{}' is not a finite number", key, text));
  }
  return v;
}

std::uint64_t to_count(const std::string& key, const std::string& text) {
  const std::string t = trim(text);
  std::uint64_t v = 0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (t.empty() || ec != std::errc{} || ptr != t.data() + t.size()) {
    throw ConfigError(fmt::format("{}: '{}' is not a nonnegative integer", key, text));
  }
  return v;
}

std::vector<double> to_numbers(const std::string& key, const std::string& text) {
  std::vector<double> out;
  for (const auto& item : split_list(text)) out.push_back(to_number(key, item));
  return out;
}

void require(bool ok, const std::string& message) {
  if (!ok) throw ConfigError(message);
}

using Setter = void (*)(ExperimentConfig&, const std::string& key, const std::string& value);

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table = {
      {"objective.id",
       [](ExperimentConfig& c, const std::string& k, const std::string& v) {
         require(!trim(v).empty(), k + ": empty objective id");
         c.objective_id = trim(v);
       }},
      {"params.alpha",
       [](ExperimentConfig& c, const std::string& k, const std::string& v) {
         c.alpha = to_number(k, v);
       }},
      {"params.beta",
       [](ExperimentConfig& c, const std::string& k, const std::string& v) {
         c.beta = to_number(k, v);
       }},
      {"params.step",
       [](ExperimentConfig& c, const std::string& k, const std::string& v) {
         c.step = to_number(k, v);
       }},
      {"params.step_fraction",
       [](ExperimentConfig& c, const std::string& k, const std::string& v) {
         c.step_fraction = to_number(k, v);
         require(c.step_fraction > 0.0 && c.step_fraction < 1.0,
                 fmt::format("{} = {} must lie in (0,1)", k, c.step_fraction));
       }},
      {"start.x0",
       [](ExperimentConfig& c, const std::string& k, const std::string& v) {
         require(!trim(v).empty(), k + ": empty start");
         c.x0 = trim(v);
       }},
      {"start.seed",
       [](ExperimentConfig& c, const std::string& k, const std::string& v) {
         c.seed = to_count(k, v);
       }},
      {"stop.grad_tol",
       [](ExperimentConfig& c, const std::string& k, const std::string& v) {
         c.stop.grad_tol = to_number(k, v);
         require(c.stop.grad_tol >= 0.0, k + " must be >= 0");
       }},
      {"stop.max_iter",
       [](ExperimentConfig& c, const std::string& k, const std::string& v) {
         c.stop.max_iter = to_count(k, v);
       }},
      {"stop.diverge_norm",
       [](ExperimentConfig& c, const std::string& k, const std::string& v) {
         c.stop.diverge_norm = to_number(k, v);
         require(c.stop.diverge_norm > 0.0, k + " must be > 0");
       }},
      {"monitors.enabled",
       [](ExperimentConfig& c, const std::string&, const std::string& v) {
         c.monitors.clear();
         for (const auto& name : split_list(v)) {
           const Monitor m = parse_monitor(name);
           if (!c.monitor_enabled(m)) c.monitors.push_back(m);
         }
       }},
      {"rates.theta",
       [](ExperimentConfig& c, const std::string& k, const std::string& v) {
         const double t = to_number(k, v);
         require(t > 0.0 && t < 1.0, fmt::format("{} = {} is outside (0,1)", k, t));
         c.theta = t;
       }},
      {"rates.p",
       [](ExperimentConfig& c, const std::string& k, const std::string& v) {
         c.rate_orders = to_numbers(k, v);
         for (double p : c.rate_orders) require(p > 0.0, fmt::format("{}: p = {} must be > 0", k, p));
       }},
      {"rates.window",
       [](ExperimentConfig& c, const std::string& k, const std::string& v) {
         c.rate_window = to_number(k, v);
         require(c.rate_window > 0.0 && c.rate_window < 1.0, k + " must lie in (0,1)");
       }},
      {"rates.margin",
       [](ExperimentConfig& c, const std::string& k, const std::string& v) {
         c.rate_margin = to_count(k, v);
       }},
      {"ode.variant",
       [](ExperimentConfig& c, const std::string& k, const std::string& v) {
         try {
           c.ode_variant = parse_ode_variant(trim(v));
         } catch (const InputError& e) {
           throw ConfigError(fmt::format("{}: {}", k, e.what()));
         }
       }},
      {"ode.gamma",
       [](ExperimentConfig& c, const std::string& k, const std::string& v) {
         c.ode_gamma = to_number(k, v);
         require(c.ode_gamma > 0.0, k + " must be > 0");
       }},
      {"ode.alpha",
       [](ExperimentConfig& c, const std::string& k, const std::string& v) {
         c.ode_alpha = to_number(k, v);
         require(*c.ode_alpha > 0.0, k + " must be > 0");
       }},
      {"ode.s_ladder",
       [](ExperimentConfig& c, const std::string& k, const std::string& v) {
         c.s_ladder = to_numbers(k, v);
         for (double s : c.s_ladder) require(s > 0.0, fmt::format("{}: s = {} must be > 0", k, s));
       }},
      {"ode.t_end",
       [](ExperimentConfig& c, const std::string& k, const std::string& v) {
         c.ode_t_end = to_number(k, v);
         require(c.ode_t_end > 0.0, k + " must be > 0");
       }},
      {"ode.match_index",
       [](ExperimentConfig& c, const std::string& k, const std::string& v) {
         c.ode_match_index = to_count(k, v);
         require(c.ode_match_index >= 1, k + " must be >= 1");
       }},
      {"ode.substeps",
       [](ExperimentConfig& c, const std::string& k, const std::string& v) {
         const auto n = to_count(k, v);
         require(n >= 1 && n <= 1'000'000, k + " must lie in [1, 1e6]");
         c.ode_substeps = static_cast<int>(n);
       }},
      {"sweep.alpha",
       [](ExperimentConfig& c, const std::string& k, const std::string& v) {
         c.sweep_alpha = to_numbers(k, v);
       }},
      {"sweep.beta",
       [](ExperimentConfig& c, const std::string& k, const std::string& v) {
         c.sweep_beta = to_numbers(k, v);
       }},
      {"sweep.s_fraction",
       [](ExperimentConfig& c, const std::string& k, const std::string& v) {
         c.sweep_s_fraction = to_numbers(k, v);
       }},
      {"sweep.objective",
       [](ExperimentConfig& c, const std::string&, const std::string& v) {
         c.sweep_objective = split_list(v);
       }},
      {"output.dir",
       [](ExperimentConfig& c, const std::string& k, const std::string& v) {
         require(!trim(v).empty(), k + ": empty path");
         c.output_dir = trim(v);
       }},
      {"output.workers",
       [](ExperimentConfig& c, const std::string& k, const std::string& v) {
         const auto n = to_count(k, v);
         require(n >= 1 && n <= 1024, k + " must lie in [1, 1024]");
         c.workers = static_cast<unsigned>(n);
       }},
  };
  return table;
}

}  // namespace

ExperimentConfig parse_config(std::istream& in) {
  pt::ptree tree;
  try {
    pt::ini_parser::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(fmt::format("config syntax error: {}", e.what()));
  }

  ExperimentConfig config;
  for (const auto& [section, body] : tree) {
    if (body.empty() && !body.data().empty()) {
      throw ConfigError(fmt::format("key '{}' appears outside any section", section));
    }
    const bool known = std::any_of(setters().begin(), setters().end(), [&](const auto& entry) {
      return entry.first.compare(0, section.size() + 1, section + ".") == 0;
    });
    if (!known) throw ConfigError(fmt::format("unknown config section [{}]", section));
    for (const auto& [key, node] : body) {
      const std::string full = section + "." + key;
      const auto it = setters().find(full);
      if (it == setters().end()) throw ConfigError(fmt::format("unknown config key '{}'", full));
      const std::string value = node.get_value<std::string>();
      it->second(config, full, value);
      config.echo.emplace_back(full, trim(value));
    }
  }
  return config;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(fmt::format("cannot open config file '{}'", path.string()));
  return parse_config(in);
}

InertialParams resolve_params(const ExperimentConfig& config, const Objective& obj) {
  InertialParams params{config.alpha, config.beta, 0.0};
  if (config.step) {
    params.step = *config.step;
  } else {
    if (!(config.beta > 0.0 && config.beta < 1.0)) {
      throw ConfigError(fmt::format("beta = {} violates 0 < beta < 1", config.beta));
    }
    const double bound = step_bound(config.beta, obj.lipschitz);
    if (!std::isfinite(bound)) {
      throw ConfigError("objective has L_g = 0; give an explicit step");
    }
    params.step = config.step_fraction * bound;
  }
  validate(params, obj.lipschitz);
  return params;
}

Vector resolve_start(const ExperimentConfig& config, const Objective& obj) {
  const auto dim = static_cast<Eigen::Index>(obj.dim);
  if (config.x0 == "default") return obj.default_start;
  if (config.x0 == "zeros") return Vector::Zero(dim);
  if (config.x0 == "random") {
    std::mt19937_64 rng(config.seed);
    Vector x(dim);
    for (Eigen::Index i = 0; i < dim; ++i) {
      std::uniform_real_distribution<double> u(obj.box.lower(i), obj.box.upper(i));
      x(i) = u(rng);
    }
    return x;
  }
  const auto values = to_numbers("start.x0", config.x0);
  if (static_cast<Eigen::Index>(values.size()) != dim) {
    throw ConfigError(fmt::format("start.x0 has {} coordinates, objective '{}' has dimension {}",
                                  values.size(), obj.id, obj.dim));
  }
  return Eigen::Map<const Vector>(values.data(), dim);
}

namespace {

template <typename T>
std::string join(const std::vector<T>& items) {
  return fmt::format("{}", fmt::join(items, ", "));
}

}  // namespace

std::string render_config(const ExperimentConfig& c) {
  std::string out;
  auto line = [&out](std::string_view key, const auto& value) {
    out += fmt::format("{} = {}\n", key, value);
  };
  out += "[objective]\n";
  line("id", c.objective_id);
  out += "\n[params]\n";
  line("alpha", c.alpha);
  line("beta", c.beta);
  if (c.step) {
    line("step", *c.step);
  } else {
    line("step_fraction", c.step_fraction);
  }
  out += "\n[start]\n";
  line("x0", c.x0);
  line("seed", c.seed);
  out += "\n[stop]\n";
  line("grad_tol", c.stop.grad_tol);
  line("max_iter", c.stop.max_iter);
  line("diverge_norm", c.stop.diverge_norm);
  out += "\n[monitors]\n";
  std::vector<std::string_view> names;
  for (Monitor m : c.monitors) names.push_back(to_string(m));
  line("enabled", join(names));
  out += "\n[rates]\n";
  if (c.theta) line("theta", *c.theta);
  line("p", join(c.rate_orders));
  line("window", c.rate_window);
  line("margin", c.rate_margin);
  out += "\n[ode]\n";
  line("variant", to_string(c.ode_variant));
  line("gamma", c.ode_gamma);
  if (c.ode_alpha) line("alpha", *c.ode_alpha);
  line("s_ladder", join(c.s_ladder));
  line("t_end", c.ode_t_end);
  line("match_index", c.ode_match_index);
  line("substeps", c.ode_substeps);
  if (c.sweep_alpha || c.sweep_beta || c.sweep_s_fraction || c.sweep_objective) {
    out += "\n[sweep]\n";
    if (c.sweep_alpha) line("alpha", join(*c.sweep_alpha));
    if (c.sweep_beta) line("beta", join(*c.sweep_beta));
    if (c.sweep_s_fraction) line("s_fraction", join(*c.sweep_s_fraction));
    if (c.sweep_objective) line("objective", join(*c.sweep_objective));
  }
  out += "\n[output]\n";
  line("dir", c.output_dir.string());
  line("workers", c.workers);
  return out;
}

std::string default_config_text() { return render_config(ExperimentConfig{}); }

}  // namespace inertia
