#include "inertia/objectives.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <random>
#include <sstream>

#include <Eigen/Dense>

#include "inertia/errors.hpp"

namespace inertia {

bool Box::contains(const Vector& x) const {
  return x.size() == lower.size() && (x.array() >= lower.array()).all() &&
         (x.array() <= upper.array()).all();
}

double Objective::distance_to_critical_set(const Vector& x) const {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& c : critical_points) best = std::min(best, (x - c).norm());
  return best;
}

Vector finite_difference_gradient(const Objective& obj, const Vector& x) {
  const double h = 1e-6 * (1.0 + x.norm());
  Vector g(x.size());
  Vector probe = x;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const double xi = x[i];
    probe[i] = xi + h;
    const double fp = obj.value(probe);
    probe[i] = xi - h;
    const double fm = obj.value(probe);
    probe[i] = xi;
    g[i] = (fp - fm) / (2.0 * h);
  }
  return g;
}

GradientCheckReport check_gradient(const Objective& obj, std::span<const Vector> points,
                                   const GradientCheckOptions& options) {
  if (points.empty()) throw InputError("check_gradient: no points given");
  GradientCheckReport report;
  double worst_score = -1.0;
  for (std::size_t k = 0; k < points.size(); ++k) {
    const Vector& x = points[k];
    if (x.size() != obj.dim) {
      std::ostringstream msg;
      msg << "check_gradient: point " << k << " has length " << x.size()
          << ", objective dimension is " << obj.dim;
      throw InputError(msg.str());
    }
    const Vector analytic = obj.gradient(x);
    const Vector numeric = finite_difference_gradient(obj, x);
    const double abs_err = (analytic - numeric).norm();
    const double scale = std::max(analytic.norm(), numeric.norm());
    const double rel_err = scale > 0.0 ? abs_err / scale : 0.0;

    report.max_abs_error = std::max(report.max_abs_error, abs_err);
    report.max_rel_error = std::max(report.max_rel_error, rel_err);
    const bool ok = rel_err <= options.rel_tol || abs_err <= options.abs_tol;
    if (!ok) ++report.failures;

    // Rank by how far the point is from passing under the looser test.
    const double score = std::min(rel_err / options.rel_tol, abs_err / options.abs_tol);
    if (score > worst_score) {
      worst_score = score;
      report.worst_index = k;
      report.worst_point = x;
    }
  }
  return report;
}

std::vector<Vector> sample_box(const Objective& obj, std::size_t count, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<Vector> out;
  out.reserve(count);
  for (std::size_t k = 0; k < count; ++k) {
    Vector x(obj.dim);
    for (int i = 0; i < obj.dim; ++i) {
      x[i] = obj.box.lower[i] + unit(rng) * (obj.box.upper[i] - obj.box.lower[i]);
    }
    out.push_back(std::move(x));
  }
  return out;
}

// -- quadratic -----------------------------------------------------------------

Objective make_quadratic(const Matrix& q, const Vector& b, std::string id) {
  const auto n = q.rows();
  if (n == 0 || q.cols() != n || b.size() != n) {
    throw InputError("make_quadratic: Q must be square and match b");
  }
  if (!q.isApprox(q.transpose(), 1e-12)) throw InputError("make_quadratic: Q is not symmetric");
  Eigen::SelfAdjointEigenSolver<Matrix> eig(q, Eigen::EigenvaluesOnly);
  const Vector& lambda = eig.eigenvalues();
  const double lmax = lambda.maxCoeff();
  const double lmin = lambda.minCoeff();
  if (lmin < -1e-12 * std::max(1.0, lmax)) {
    throw InputError("make_quadratic: Q is not positive semidefinite");
  }

  Objective obj;
  obj.id = std::move(id);
  obj.dim = static_cast<int>(n);
  obj.lipschitz = std::max(lmax, 0.0);

  const bool definite = lmin > 0.0;
  std::optional<Vector> minimizer;
  std::optional<double> fmin;
  if (definite) {
    minimizer = q.ldlt().solve(b);
    fmin = -0.5 * b.dot(*minimizer);
  }
  // Around the minimizer the value is evaluated in shifted form so that
  // g(x) - g(xbar) does not suffer cancellation.
  if (minimizer) {
    obj.value = [q, xbar = *minimizer, fmin = *fmin](const Vector& x) {
      const Vector d = x - xbar;
      return 0.5 * d.dot(q * d) + fmin;
    };
  } else {
    obj.value = [q, b](const Vector& x) { return 0.5 * x.dot(q * x) - b.dot(x); };
  }
  obj.gradient = [q, b](const Vector& x) -> Vector { return q * x - b; };
  obj.lower_bounded = definite || b.isZero(0.0);
  if (minimizer) {
    obj.known_critical_point = *minimizer;
    obj.known_loj_exponent = 0.5;
    obj.critical_points.push_back(*minimizer);
  }
  const Vector centre = minimizer.value_or(Vector::Zero(n));
  obj.box.lower = centre.array() - 2.0;
  obj.box.upper = centre.array() + 2.0;
  obj.default_start = centre.array() + 1.0;
  return obj;
}

Objective make_quadratic(int dim, double cond, std::uint64_t rotation_seed, double shift) {
  if (dim < 1) throw InputError("quadratic: dim must be >= 1");
  if (!(cond >= 1.0)) throw InputError("quadratic: cond must be >= 1");
  Vector lambda(dim);
  for (int i = 0; i < dim; ++i) {
    const double frac = dim == 1 ? 0.0 : static_cast<double>(i) / (dim - 1);
    lambda[i] = std::pow(cond, -frac);
  }
  Matrix q = lambda.asDiagonal();
  if (rotation_seed != 0) {
    std::mt19937_64 rng(rotation_seed);
    std::normal_distribution<double> normal;
    Matrix gauss(dim, dim);
    for (int j = 0; j < dim; ++j)
      for (int i = 0; i < dim; ++i) gauss(i, j) = normal(rng);
    const Matrix orth = Eigen::HouseholderQR<Matrix>(gauss).householderQ();
    q = orth * q * orth.transpose();
    q = 0.5 * (q + q.transpose()).eval();
  }
  const Vector b = q * Vector::Constant(dim, shift);

  std::ostringstream id;
  id << "quadratic:dim=" << dim << ":cond=" << cond;
  if (rotation_seed != 0) id << ":rotate=" << rotation_seed;
  if (shift != 0.0) id << ":shift=" << shift;
  Objective obj = make_quadratic(q, b, id.str());
  if (rotation_seed == 0) {
    obj.lipschitz = 1.0;
    obj.gradient = [lambda, b](const Vector& x) -> Vector {
      return (lambda.array() * x.array()).matrix() - b;
    };
  }
  return obj;
}

// -- power family --------------------------------------------------------------

Objective make_power(int q, int dim, double radius) {
  if (q < 2 || q % 2 != 0) throw InputError("power: q must be an even integer >= 2");
  if (dim < 1) throw InputError("power: dim must be >= 1");
  if (!(radius > 0.0)) throw InputError("power: radius must be positive");

  Objective obj;
  std::ostringstream id;
  id << "power:q=" << q;
  if (dim != 1) id << ":dim=" << dim;
  if (radius != 1.0) id << ":radius=" << radius;
  obj.id = id.str();
  obj.dim = dim;
  const int half = q / 2;
  obj.value = [half](const Vector& x) { return std::pow(x.squaredNorm(), half); };
  obj.gradient = [q, half](const Vector& x) -> Vector {
    return static_cast<double>(q) * std::pow(x.squaredNorm(), half - 1) * x;
  };
  // Largest Hessian eigenvalue q (q-1) ||x||^(q-2), maximised on the ball.
  obj.lipschitz = static_cast<double>(q) * (q - 1) * std::pow(radius, q - 2);
  obj.known_critical_point = Vector::Zero(dim);
  obj.known_loj_exponent = 1.0 - 1.0 / q;
  obj.lower_bounded = true;
  obj.critical_points.push_back(Vector::Zero(dim));
  // Sampling cube inscribed in the ball, so samples respect the stated L_g.
  const double half_side = radius / std::sqrt(static_cast<double>(dim));
  obj.box.lower = Vector::Constant(dim, -half_side);
  obj.box.upper = Vector::Constant(dim, half_side);
  obj.default_start = Vector::Constant(dim, 0.5 * half_side);
  return obj;
}

// -- Rosenbrock ----------------------------------------------------------------

Objective make_rosenbrock() {
  Objective obj;
  obj.id = "rosenbrock";
  obj.dim = 2;
  obj.value = [](const Vector& x) {
    const double a = 1.0 - x[0];
    const double b = x[1] - x[0] * x[0];
    return a * a + 100.0 * b * b;
  };
  obj.gradient = [](const Vector& x) -> Vector {
    const double b = x[1] - x[0] * x[0];
    Vector g(2);
    g[0] = -2.0 * (1.0 - x[0]) - 400.0 * x[0] * b;
    g[1] = 200.0 * b;
    return g;
  };
  // Hessian [[1200x^2 - 400y + 2, -400x], [-400x, 200]]; its spectral norm is
  // at most the max row sum, bounded on the box by 2902 + 600.
  obj.lipschitz = 3502.0;
  obj.known_critical_point = Vector::Ones(2);
  obj.known_loj_exponent = 0.5;
  obj.lower_bounded = true;
  obj.critical_points.push_back(Vector::Ones(2));
  obj.box.lower = (Vector(2) << -1.5, -0.5).finished();
  obj.box.upper = (Vector(2) << 1.5, 2.5).finished();
  obj.default_start = (Vector(2) << -1.2, 1.0).finished();
  return obj;
}

// -- double well ---------------------------------------------------------------

Objective make_double_well() {
  Objective obj;
  obj.id = "doublewell";
  obj.dim = 1;
  obj.value = [](const Vector& x) {
    const double w = x[0] * x[0] - 1.0;
    return w * w;
  };
  obj.gradient = [](const Vector& x) -> Vector {
    return Vector::Constant(1, 4.0 * x[0] * (x[0] * x[0] - 1.0));
  };
  // |g''| = |12x^2 - 4| <= 44 on [-2, 2].
  obj.lipschitz = 44.0;
  obj.known_critical_point = Vector::Ones(1);
  obj.known_loj_exponent = 0.5;
  obj.lower_bounded = true;
  obj.critical_points = {Vector::Constant(1, -1.0), Vector::Zero(1), Vector::Ones(1)};
  obj.box.lower = Vector::Constant(1, -2.0);
  obj.box.upper = Vector::Constant(1, 2.0);
  obj.default_start = Vector::Constant(1, 1.5);
  return obj;
}

// -- coercive quartic ------------------------------------------------------------

Objective make_quartic2d() {
  Objective obj;
  obj.id = "quartic2d";
  obj.dim = 2;
  obj.value = [](const Vector& x) {
    const double a = x[0] * x[0];
    const double b = x[1] * x[1];
    return a * a + b * b - 4.0 * x[0] * x[1] + 1.0;
  };
  obj.gradient = [](const Vector& x) -> Vector {
    Vector g(2);
    g[0] = 4.0 * x[0] * x[0] * x[0] - 4.0 * x[1];
    g[1] = 4.0 * x[1] * x[1] * x[1] - 4.0 * x[0];
    return g;
  };
  // Hessian [[12x^2, -4], [-4, 12y^2]]: spectral norm <= 48 + 4 on [-2, 2]^2.
  obj.lipschitz = 52.0;
  obj.known_critical_point = Vector::Ones(2);
  obj.known_loj_exponent = 0.5;
  obj.lower_bounded = true;
  obj.critical_points = {Vector::Ones(2), -Vector::Ones(2), Vector::Zero(2)};
  obj.box.lower = Vector::Constant(2, -2.0);
  obj.box.upper = Vector::Constant(2, 2.0);
  obj.default_start = (Vector(2) << 1.5, 0.2).finished();
  return obj;
}

// -- id parsing ----------------------------------------------------------------

namespace {

struct ParsedId {
  std::string family;
  std::map<std::string, std::string> options;
};

ParsedId parse_id(const std::string& id) {
  ParsedId out;
  std::istringstream in(id);
  std::string token;
  bool first = true;
  while (std::getline(in, token, ':')) {
    if (first) {
      out.family = token;
      first = false;
      continue;
    }
    const auto eq = token.find('=');
    if (eq == std::string::npos || eq == 0 || eq + 1 == token.size()) {
      throw InputError("objective id '" + id + "': expected key=value, got '" + token + "'");
    }
    const auto key = token.substr(0, eq);
    if (!out.options.emplace(key, token.substr(eq + 1)).second) {
      throw InputError("objective id '" + id + "': duplicate key '" + key + "'");
    }
  }
  if (out.family.empty()) throw InputError("empty objective id");
  return out;
}

class OptionReader {
 public:
  OptionReader(const std::string& id, std::map<std::string, std::string> options)
      : id_(id), options_(std::move(options)) {}

  double number(const std::string& key, double fallback) {
    const auto it = options_.find(key);
    if (it == options_.end()) return fallback;
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(it->second, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != it->second.size()) {
      throw InputError("objective id '" + id_ + "': '" + key + "' is not a number");
    }
    options_.erase(it);
    return v;
  }

  int integer(const std::string& key, int fallback) {
    const double v = number(key, fallback);
    if (v != std::floor(v)) {
      throw InputError("objective id '" + id_ + "': '" + key + "' must be an integer");
    }
    return static_cast<int>(v);
  }

  void finish() const {
    if (!options_.empty()) {
      throw InputError("objective id '" + id_ + "': unknown key '" + options_.begin()->first + "'");
    }
  }

 private:
  std::string id_;
  std::map<std::string, std::string> options_;
};

}  // namespace

Objective make_objective(const std::string& id) {
  auto parsed = parse_id(id);
  OptionReader opts(id, std::move(parsed.options));
  Objective obj;
  if (parsed.family == "quadratic") {
    const int dim = opts.integer("dim", 1);
    const double cond = opts.number("cond", 1.0);
    const int rotate = opts.integer("rotate", 0);
    const double shift = opts.number("shift", 0.0);
    if (rotate < 0) throw InputError("quadratic: rotate must be >= 0");
    opts.finish();
    obj = make_quadratic(dim, cond, static_cast<std::uint64_t>(rotate), shift);
  } else if (parsed.family == "power") {
    const int q = opts.integer("q", 4);
    const int dim = opts.integer("dim", 1);
    const double radius = opts.number("radius", 1.0);
    opts.finish();
    obj = make_power(q, dim, radius);
  } else if (parsed.family == "rosenbrock") {
    opts.finish();
    obj = make_rosenbrock();
  } else if (parsed.family == "doublewell") {
    opts.finish();
    obj = make_double_well();
  } else if (parsed.family == "quartic2d") {
    opts.finish();
    obj = make_quartic2d();
  } else {
    throw InputError("unknown objective id '" + id + "'");
  }
  obj.id = id;
  return obj;
}

std::vector<Objective> builtin_corpus() {
  return {make_objective("quadratic:dim=10:cond=100"),
          make_objective("power:q=4"),
          make_objective("power:q=6"),
          make_objective("power:q=8"),
          make_objective("rosenbrock"),
          make_objective("doublewell"),
          make_objective("quartic2d")};
}

std::string objective_id_grammar() {
  return "id      := family (':' key '=' value)*\n"
         "quadratic  keys: dim (int, 1), cond (>=1, 1), rotate (seed, 0 = diagonal), shift (0)\n"
         "           1/2 x'Qx - b'x, eig(Q) geometric in [1/cond, 1], L_g = 1, theta = 1/2\n"
         "power      keys: q (even >= 2, 4), dim (int, 1), radius (1)\n"
         "           ||x||^q on the ball, L_g = q(q-1) radius^(q-2), theta = 1 - 1/q at 0\n"
         "rosenbrock (1-x)^2 + 100(y-x^2)^2 on [-1.5,1.5]x[-0.5,2.5], L_g = 3502\n"
         "doublewell (x^2-1)^2 on [-2,2], L_g = 44, critical points -1, 0, 1\n"
         "quartic2d  x^4 + y^4 - 4xy + 1 on [-2,2]^2, L_g = 52, critical points +-(1,1), 0\n";
}

}  // namespace inertia
