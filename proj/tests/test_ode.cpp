#include <cmath>
#include <vector>

#include "doctest.h"

#include "inertia/errors.hpp"
#include "inertia/objectives.hpp"
#include "inertia/ode.hpp"

using namespace inertia;

namespace {

Objective flat(int dim) {
  Objective obj = make_quadratic(dim, 1.0);
  obj.id = "flat";
  obj.value = [](const Vector&) { return 0.0; };
  obj.gradient = [dim](const Vector&) { return Vector(Vector::Zero(dim)); };
  obj.lipschitz = 0.0;
  return obj;
}

OdeSpec spec_for(OdeVariant variant, double gamma, const Vector& x0) {
  OdeSpec spec;
  spec.variant = variant;
  spec.gamma = gamma;
  spec.x0 = x0;
  spec.v0 = Vector::Zero(x0.size());
  return spec;
}

}  // namespace

TEST_CASE("zero gradient with zero velocity stays put") {
  const Vector x0 = Vector::LinSpaced(3, -1.0, 2.0);
  for (auto variant : {OdeVariant::avd, OdeVariant::damped}) {
    const auto samples = integrate(spec_for(variant, 2.0, x0), flat(3), 4.0, 0.01);
    CHECK(samples.size() == 301);
    CHECK(samples.front().t == 1.0);
    CHECK(samples.back().t == doctest::Approx(4.0));
    for (const auto& s : samples) {
      CHECK(s.x == x0);
      CHECK(s.v.norm() == 0.0);
    }
  }
}

TEST_CASE("RK4 shows fourth-order self-convergence") {
  const Objective rosen = make_rosenbrock();
  OdeSpec spec = spec_for(OdeVariant::damped, 1.0, Vector::Constant(2, 0.5));
  spec.v0 = Vector::Constant(2, 0.1);
  CHECK(self_convergence_order(spec, rosen, 2.0, 1.0 / 256) >= 3.8);

  const Objective quad = make_objective("quadratic:dim=4:cond=10");
  OdeSpec avd = spec_for(OdeVariant::avd, 0.0, quad.default_start);
  CHECK(self_convergence_order(avd, quad, 5.0, 1.0 / 16) >= 3.8);
}

TEST_CASE("damped flow dissipates g + |v|^2 / 2") {
  const Objective obj = make_quartic2d();
  OdeSpec spec = spec_for(OdeVariant::damped, 1.0, obj.default_start);
  spec.v0 = Vector::Constant(2, 0.5);
  const auto samples = integrate(spec, obj, 10.0, 1e-3);
  double prev = INFINITY;
  for (const auto& s : samples) {
    const double energy = obj.value(s.x) + 0.5 * s.v.squaredNorm();
    CHECK(energy <= prev + 1e-12);
    prev = energy;
  }
}

TEST_CASE("damped with zero gamma reproduces avd bitwise") {
  const Objective obj = make_rosenbrock();
  const auto a = integrate(spec_for(OdeVariant::avd, 0.0, obj.default_start), obj, 3.0, 0.01);
  const auto d = integrate(spec_for(OdeVariant::damped, 0.0, obj.default_start), obj, 3.0, 0.01);
  REQUIRE(a.size() == d.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].x == d[i].x);
    CHECK(a[i].v == d[i].v);
  }
}

TEST_CASE("integrator rejects bad inputs") {
  const Objective obj = make_rosenbrock();
  OdeSpec spec = spec_for(OdeVariant::avd, 0.0, obj.default_start);
  CHECK_THROWS_AS(integrate(spec, obj, 2.0, 0.0), DomainError);
  CHECK_THROWS_AS(integrate(spec, obj, 0.5, 0.1), DomainError);
  spec.t0 = 0.0;
  CHECK_THROWS_AS(integrate(spec, obj, 2.0, 0.1), DomainError);
  spec.t0 = 1.0;
  spec.v0 = Vector::Zero(3);
  CHECK_THROWS_AS(integrate(spec, obj, 2.0, 0.1), InputError);
  CHECK(parse_ode_variant(to_string(OdeVariant::damped)) == OdeVariant::damped);
  CHECK_THROWS_AS(parse_ode_variant("stiff"), InputError);
}

TEST_CASE("matched beta follows the variant scaling") {
  CHECK(matched_beta(OdeVariant::avd, 2.0, 0.01) == doctest::Approx(0.98));
  CHECK(matched_beta(OdeVariant::damped, 2.0, 0.01) == doctest::Approx(0.8));
}

TEST_CASE("comparison distance is zero without a gradient") {
  const std::vector<double> s{0.01, 0.0025};
  CompareOptions opts;
  opts.x0 = Vector::Constant(2, 0.7);
  const auto rows = compare_discrete_continuous(flat(2), 1.0, 3.0, s, OdeVariant::damped, opts);
  REQUIRE(rows.size() == 2);
  for (const auto& r : rows) {
    CHECK(r.sup_distance == 0.0);
    CHECK(r.n_compared > 0);
  }
}

TEST_CASE("horizon must extend past the match index") {
  const Objective obj = make_objective("quadratic:dim=10:cond=100");
  const std::vector<double> s{0.01};
  CompareOptions opts;
  opts.match_index = 5;
  opts.t_end = 5.0 * std::sqrt(0.01);
  CHECK_THROWS_AS(compare_discrete_continuous(obj, 1.0, 3.0, s, OdeVariant::damped, opts),
                  ConfigError);
  opts.t_end = 6.0 * std::sqrt(0.01);
  const auto rows = compare_discrete_continuous(obj, 1.0, 3.0, s, OdeVariant::damped, opts);
  CHECK(rows[0].n_compared == 2);
  CHECK(rows[0].sup_distance > 0.0);
  CHECK(rows[0].sup_distance < 0.01);
}

TEST_CASE("discrete-continuous distance shrinks along the step ladder") {
  SUBCASE("quadratic, damped, gamma 1") {
    const Objective obj = make_objective("quadratic:dim=10:cond=100");
    const std::vector<double> s{1e-2, 2.5e-3, 6.25e-4};
    const auto rows = compare_discrete_continuous(obj, 1.0, 3.0, s, OdeVariant::damped);
    REQUIRE(rows.size() == 3);
    CHECK(rows[0].sup_distance > rows[1].sup_distance);
    CHECK(rows[1].sup_distance > rows[2].sup_distance);
    CHECK(rows[2].sup_distance > 0.0);
  }
  SUBCASE("rosenbrock, damped, gamma 10") {
    const Objective obj = make_rosenbrock();
    const std::vector<double> s{1e-5, 2.5e-6, 6.25e-7};
    const auto rows = compare_discrete_continuous(obj, 10.0, 3.0, s, OdeVariant::damped);
    CHECK(rows[0].sup_distance > rows[1].sup_distance);
    CHECK(rows[1].sup_distance > rows[2].sup_distance);
  }
}

TEST_CASE("inadmissible matched parameters are rejected") {
  const Objective obj = make_objective("quadratic:dim=10:cond=100");
  // gamma sqrt(s) = 1 gives beta = 0.
  const std::vector<double> s_zero_beta{0.01};
  CHECK_THROWS_AS(compare_discrete_continuous(obj, 10.0, 3.0, s_zero_beta, OdeVariant::damped),
                  ConfigError);
  // s = 1.9 exceeds 2(1 - beta)/L for beta close to 1.
  const std::vector<double> s_large{1.9};
  CHECK_THROWS_AS(compare_discrete_continuous(obj, 0.01, 3.0, s_large, OdeVariant::avd),
                  ConfigError);
  const std::vector<double> s_neg{-0.01};
  CHECK_THROWS_AS(compare_discrete_continuous(obj, 1.0, 3.0, s_neg, OdeVariant::damped),
                  ConfigError);
}
