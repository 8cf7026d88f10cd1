#include <linesfm/errors.hpp>
#include <linesfm/simplex.hpp>

#include <doctest.h>

#include <cmath>
#include <limits>

using namespace linesfm;
using Eigen::VectorXd;

namespace {

double rosenbrock(const VectorXd& x) {
  return 100.0 * std::pow(x[1] - x[0] * x[0], 2) + std::pow(1.0 - x[0], 2);
}

}  // namespace

TEST_SUITE("simplex_optim") {

TEST_CASE("convex quadratic") {
  const OptResult r = minimize([](const VectorXd& x) { return x.squaredNorm(); },
                               VectorXd::Ones(3));
  CHECK(r.converged);
  CHECK(r.x_min.norm() < 1e-6);
  CHECK(r.f_min == doctest::Approx(r.x_min.squaredNorm()));
}

TEST_CASE("Rosenbrock from the classical start") {
  VectorXd x0(2);
  x0 << -1.2, 1.0;
  const OptResult r = minimize(rosenbrock, x0);
  CHECK(r.f_min < 1e-8);
  CHECK(r.iterations <= 400);
  CHECK((r.x_min - VectorXd::Ones(2)).norm() < 1e-3);
  CHECK(r.f_min == rosenbrock(r.x_min));
}

TEST_CASE("zero iteration budget returns the start") {
  SimplexConfig cfg;
  cfg.max_iters = 0;
  const VectorXd x0 = VectorXd::Constant(2, 0.7);
  const OptResult r = minimize([](const VectorXd& x) { return x.squaredNorm(); }, x0, cfg);
  CHECK_FALSE(r.converged);
  CHECK(r.x_min == x0);
  CHECK(r.f_min == doctest::Approx(0.98));
}

TEST_CASE("non-finite objective values are reported") {
  auto nan_far = [](const VectorXd& x) {
    return x[0] > 1.02 ? std::numeric_limits<double>::quiet_NaN() : x.squaredNorm();
  };
  CHECK_THROWS_AS(minimize(nan_far, VectorXd::Ones(2)), NonFiniteObjective);
  auto inf_everywhere = [](const VectorXd&) { return std::numeric_limits<double>::infinity(); };
  CHECK_THROWS_AS(minimize(inf_everywhere, VectorXd::Ones(2)), NonFiniteObjective);
}

TEST_CASE("invalid coefficients are rejected") {
  SimplexConfig cfg;
  cfg.expansion = 0.9;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg = {};
  cfg.contraction = 1.5;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg = {};
  cfg.reflection = -1.0;
  CHECK_THROWS_AS(minimize([](const VectorXd& x) { return x.squaredNorm(); },
                           VectorXd::Ones(2), cfg),
                  std::invalid_argument);
}

TEST_CASE("the result never exceeds the starting value") {
  for (int seed = 0; seed < 50; ++seed) {
    VectorXd x0(3);
    x0 << std::sin(seed), std::cos(1.3 * seed), 0.1 * seed - 2.0;
    auto f = [](const VectorXd& x) {
      return std::pow(x[0] - 0.3, 2) + 10 * std::pow(x[1] + x[2], 2) + std::abs(x[2]);
    };
    SimplexConfig cfg;
    cfg.max_iters = seed % 7;  // includes tiny budgets
    const OptResult r = minimize(f, x0, cfg);
    CHECK(r.f_min <= f(x0));
  }
}

TEST_CASE("deterministic on repeat") {
  VectorXd x0(2);
  x0 << -1.2, 1.0;
  const OptResult a = minimize(rosenbrock, x0);
  const OptResult b = minimize(rosenbrock, x0);
  CHECK(a.x_min == b.x_min);
  CHECK(a.iterations == b.iterations);
  CHECK(a.evaluations == b.evaluations);
}

TEST_CASE("either-tolerance termination stops on a flat simplex") {
  // The initial simplex is flat in f, so the either rule stops at once while the
  // default keeps shrinking toward the minimizer.
  auto f = [](const VectorXd& x) { return 1e-12 * std::pow(x[0] - 0.01, 2); };
  const VectorXd x0 = VectorXd::Zero(1);
  SimplexConfig either;
  either.termination = SimplexTermination::Either;
  const OptResult quick = minimize(f, x0, either);
  CHECK(quick.iterations == 0);
  const OptResult full = minimize(f, x0);
  CHECK(std::abs(full.x_min[0] - 0.01) < 1e-7);
}

TEST_CASE("default initial steps scale with the start") {
  // A one-dimensional line search whose first probe is the default edge.
  int calls = 0;
  VectorXd seen;
  auto f = [&](const VectorXd& x) {
    if (++calls == 2) seen = x;
    return x.squaredNorm();
  };
  SimplexConfig cfg;
  cfg.max_iters = 1;
  minimize(f, VectorXd::Constant(1, 4.0), cfg);
  CHECK(seen[0] == doctest::Approx(4.2));
  calls = 0;
  minimize(f, VectorXd::Zero(1), cfg);
  CHECK(seen[0] == doctest::Approx(0.00025));
}

}  // TEST_SUITE
