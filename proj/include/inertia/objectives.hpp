#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace inertia {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Axis-aligned box. Corpus members state their Lipschitz constant as valid
/// on this box, and random test points are drawn from it.
struct Box {
  Vector lower;
  Vector upper;

  bool contains(const Vector& x) const;
};

/// A smooth function bundle: value, analytic gradient and the metadata the
/// solver and the monitors need. Immutable once built; share freely.
struct Objective {
  std::string id;
  int dim = 0;
  std::function<double(const Vector&)> value;
  std::function<Vector(const Vector&)> gradient;
  double lipschitz = 0.0;
  std::optional<Vector> known_critical_point;
  std::optional<double> known_loj_exponent;
  bool lower_bounded = false;

  Box box;
  // Every critical point known in closed form (includes known_critical_point).
  std::vector<Vector> critical_points;
  Vector default_start;

  /// Distance from x to the nearest entry of critical_points (infinity if none).
  double distance_to_critical_set(const Vector& x) const;
};

// -- gradient verification ---------------------------------------------------

struct GradientCheckOptions {
  double rel_tol = 1e-5;
  double abs_tol = 1e-6;  // fallback where the gradient itself is ~0
};

struct GradientCheckReport {
  double max_rel_error = 0.0;
  double max_abs_error = 0.0;
  std::size_t worst_index = 0;
  Vector worst_point;
  std::size_t failures = 0;

  bool passed() const { return failures == 0; }
};

/// Central differences, componentwise, h = 1e-6 * (1 + ||x||).
Vector finite_difference_gradient(const Objective& obj, const Vector& x);

/// Compares the analytic gradient with central differences at each point. A
/// point fails when both its relative and absolute discrepancies exceed the
/// tolerances. Throws InputError on a dimension mismatch.
GradientCheckReport check_gradient(const Objective& obj, std::span<const Vector> points,
                                   const GradientCheckOptions& options = {});

/// Uniform samples from obj.box, deterministic in seed.
std::vector<Vector> sample_box(const Objective& obj, std::size_t count, std::uint64_t seed);

// -- corpus --------------------------------------------------------------------

/// 1/2 x^T Q x - b^T x for symmetric positive-semidefinite Q. L_g is the
/// largest eigenvalue of Q. When Q is definite the minimizer is tracked with
/// exponent 1/2.
Objective make_quadratic(const Matrix& q, const Vector& b, std::string id = "quadratic");

/// Diagonal quadratic with eigenvalues geometrically spaced in [1/cond, 1].
/// A nonzero rotation seed conjugates Q by a random orthogonal matrix; a
/// nonzero shift moves the minimizer to shift * (1, ..., 1).
Objective make_quadratic(int dim, double cond, std::uint64_t rotation_seed = 0,
                         double shift = 0.0);

/// ||x||^q for even q >= 2 on the ball of the given radius (boxed by the
/// enclosing cube for sampling). L_g = q (q-1) radius^(q-2) on that ball;
/// exponent 1 - 1/q at the origin.
Objective make_power(int q, int dim = 1, double radius = 1.0);

/// (1-x)^2 + 100 (y-x^2)^2 on [-1.5,1.5] x [-0.5,2.5].
Objective make_rosenbrock();

/// (x^2-1)^2 on [-2,2]: minima at +-1, local maximum at 0.
Objective make_double_well();

/// x^4 + y^4 - 4xy + 1 on [-2,2]^2: coercive, nonconvex; minima at
/// +-(1,1), saddle at the origin.
Objective make_quartic2d();

/// Builds an objective from its string id, e.g. "quadratic:dim=10:cond=100",
/// "power:q=4", "rosenbrock", "doublewell", "quartic2d". Throws InputError.
Objective make_objective(const std::string& id);

/// The default members of the corpus (one of each family).
std::vector<Objective> builtin_corpus();

/// Human-readable description of the id grammar, for `list-objectives`.
std::string objective_id_grammar();

}  // namespace inertia
