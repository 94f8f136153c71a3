#include <cmath>
#include <random>

#include "doctest.h"

#include "inertia/errors.hpp"
#include "inertia/objectives.hpp"

using namespace inertia;

namespace {

Vector scalar(double v) { return Vector::Constant(1, v); }

}  // namespace

TEST_CASE("half squared norm has an exact gradient") {
  const Objective obj = make_quadratic(Matrix::Identity(3, 3), Vector::Zero(3));
  CHECK(obj.lipschitz == doctest::Approx(1.0));
  REQUIRE(obj.known_loj_exponent);
  CHECK(*obj.known_loj_exponent == 0.5);
  const auto report = check_gradient(obj, sample_box(obj, 50, 7));
  CHECK(report.passed());
  CHECK(report.max_rel_error <= 1e-8);
}

TEST_CASE("central difference of x^4 at 1 matches the hand quotient") {
  const Objective obj = make_power(4);
  // h = 1e-6 (1 + |x|); ((1+h)^4 - (1-h)^4) / (2h) = 4 + 4h^2.
  const double h = 2e-6;
  const double hand = 4.0 + 4.0 * h * h;
  const Vector fd = finite_difference_gradient(obj, scalar(1.0));
  CHECK(obj.gradient(scalar(1.0))(0) == 4.0);
  CHECK(std::abs(fd(0) - 4.0) / 4.0 <= 1e-7);
  CHECK(std::abs(fd(0) - hand) <= 1e-8);
}

TEST_CASE("rosenbrock minimizer passes through the absolute fallback") {
  const Objective obj = make_rosenbrock();
  const Vector xbar = Vector::Ones(2);
  CHECK(obj.gradient(xbar).norm() == 0.0);
  const std::vector<Vector> pts{xbar};
  const auto report = check_gradient(obj, pts);
  CHECK(report.passed());
  CHECK(report.max_abs_error <= 1e-6);
}

TEST_CASE("gradient check rejects bad input") {
  const Objective obj = make_rosenbrock();
  const std::vector<Vector> wrong{Vector::Zero(3)};
  CHECK_THROWS_AS(check_gradient(obj, wrong), InputError);
  CHECK_THROWS_AS(check_gradient(obj, std::vector<Vector>{}), InputError);
}

TEST_CASE("gradient check flags a wrong gradient") {
  Objective obj = make_power(4);
  obj.gradient = [](const Vector& x) { return Vector(4.1 * x.array().cube()); };
  const auto report = check_gradient(obj, sample_box(obj, 20, 1));
  CHECK_FALSE(report.passed());
  CHECK(report.max_rel_error > 1e-3);
}

TEST_CASE("corpus covers the required families") {
  const auto corpus = builtin_corpus();
  auto find = [&](const std::string& id) -> const Objective& {
    for (const auto& o : corpus)
      if (o.id == id) return o;
    FAIL("missing corpus member " << id);
    return corpus.front();
  };
  CHECK(find("power:q=4").known_loj_exponent.value() == doctest::Approx(0.75));
  CHECK(find("rosenbrock").dim == 2);
  CHECK(find("quartic2d").dim == 2);
  const Objective& dw = find("doublewell");
  CHECK(dw.gradient(scalar(0.0))(0) == 0.0);
  CHECK(dw.value(scalar(0.0)) == 1.0);
  CHECK(dw.value(scalar(1.0)) == 0.0);
  const Objective& quad = find("quadratic:dim=10:cond=100");
  CHECK(quad.dim == 10);
  CHECK(quad.known_loj_exponent.value() == 0.5);
}

TEST_CASE("identity quadratic has unit Lipschitz constant") {
  const Objective obj = make_quadratic(1, 1.0);
  CHECK(obj.lipschitz == 1.0);
  CHECK(obj.known_loj_exponent.value() == 0.5);
  CHECK(obj.value(scalar(2.0)) == doctest::Approx(2.0));
}

TEST_CASE("every corpus member passes the gradient check at 100 box points") {
  for (const Objective& obj : builtin_corpus()) {
    CAPTURE(obj.id);
    const auto report = check_gradient(obj, sample_box(obj, 100, 2024));
    CHECK(report.passed());
    for (const auto& x : sample_box(obj, 100, 2024)) CHECK(obj.box.contains(x));
  }
}

TEST_CASE("Lipschitz constants hold on 1e4 sampled pairs") {
  for (const Objective& obj : builtin_corpus()) {
    CAPTURE(obj.id);
    const auto a = sample_box(obj, 10000, 11);
    const auto b = sample_box(obj, 10000, 12);
    double worst = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
      const double lhs = (obj.gradient(a[i]) - obj.gradient(b[i])).norm();
      const double rhs = obj.lipschitz * (a[i] - b[i]).norm();
      worst = std::max(worst, lhs - rhs);
    }
    CHECK(worst <= 1e-10);
  }
}

TEST_CASE("known critical points are stationary") {
  for (const Objective& obj : builtin_corpus()) {
    CAPTURE(obj.id);
    if (obj.known_critical_point) CHECK(obj.gradient(*obj.known_critical_point).norm() <= 1e-10);
    for (const auto& c : obj.critical_points) CHECK(obj.gradient(c).norm() <= 1e-10);
    CHECK(obj.lower_bounded);
    CHECK(obj.box.contains(obj.default_start));
  }
}

TEST_CASE("power family exponent ratio is bounded at the true exponent only") {
  const Objective obj = make_power(4);
  double bounded_max = 0.0;
  double below_prev = 0.0;
  bool below_increasing = true;
  double below_last = 0.0;
  for (int k = 0; k <= 40; ++k) {
    const Vector x = scalar(0.1 * std::pow(2.0, -k));
    const double g = obj.value(x);
    const double grad = obj.gradient(x).norm();
    bounded_max = std::max(bounded_max, std::pow(g, 0.75) / grad);
    below_last = std::pow(g, 0.6) / grad;
    if (k > 0 && !(below_last > below_prev)) below_increasing = false;
    below_prev = below_last;
  }
  // |x|^3 / (4|x|^3) = 1/4 exactly at theta = 3/4.
  CHECK(bounded_max <= 0.25 * (1 + 1e-12));
  CHECK(below_increasing);
  CHECK(below_last > 1e6);
}

TEST_CASE("objective ids parse keys and reject junk") {
  const Objective q = make_objective("quadratic:dim=3:cond=10");
  CHECK(q.dim == 3);
  CHECK(q.id == "quadratic:dim=3:cond=10");
  CHECK(make_objective("power:q=6:dim=2").dim == 2);
  CHECK(make_objective("power:q=6").known_loj_exponent.value() == doctest::Approx(5.0 / 6.0));
  CHECK_THROWS_AS(make_objective("nope"), InputError);
  CHECK_THROWS_AS(make_objective("power:q=5"), InputError);
  CHECK_THROWS_AS(make_objective("power:r=2"), InputError);
  CHECK_THROWS_AS(make_objective("quadratic:dim=x"), InputError);
  CHECK_THROWS_AS(make_objective("quadratic:dim=2:dim=3"), InputError);
  CHECK_THROWS_AS(make_objective(""), InputError);
}

TEST_CASE("rotated quadratic keeps the spectrum") {
  const Objective obj = make_objective("quadratic:dim=6:cond=50:rotate=3:shift=0.5");
  CHECK(obj.lipschitz == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(check_gradient(obj, sample_box(obj, 50, 3)).passed());
  REQUIRE(obj.known_critical_point);
  CHECK(obj.gradient(*obj.known_critical_point).norm() <= 1e-10);
  CHECK((*obj.known_critical_point - Vector::Constant(6, 0.5)).norm() <= 1e-10);
}

TEST_CASE("non-PSD or non-symmetric Q is rejected") {
  Matrix q(2, 2);
  q << 1, 0, 0, -1;
  CHECK_THROWS_AS(make_quadratic(q, Vector::Zero(2)), InputError);
  q << 1, 1, 0, 1;
  CHECK_THROWS_AS(make_quadratic(q, Vector::Zero(2)), InputError);
}
