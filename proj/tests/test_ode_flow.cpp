#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "anncalc/canonical.hpp"
#include "anncalc/ode.hpp"
#include "anncalc/sampling.hpp"

using namespace anncalc;

namespace {

std::vector<Vector> ball_points(int dim, double radius, int count,
                                std::uint64_t seed) {
  SamplePlan plan;
  plan.rho_max = radius;
  plan.radial_steps = 0;
  plan.random_points = count;
  plan.seed = seed;
  std::vector<Vector> points = make_samples(plan, dim, 0);
  points.erase(points.begin());  // drop the origin
  return points;
}

}  // namespace

TEST_CASE("explicit Euler endpoint: frozen values for the decay field") {
  const VectorField field = decay_field(1);
  Vector x0(1);
  x0[0] = 1.0;
  CHECK(euler_scheme(field, x0, 1.0, 1)[0] == 0.0);
  CHECK(euler_scheme(field, x0, 1.0, 2)[0] == 0.25);
  // (1 - 1/4)^4, exact in binary floating point
  CHECK(euler_scheme(field, x0, 1.0, 4)[0] == 0.31640625);
  CHECK_THROWS_AS(euler_scheme(field, x0, 1.0, 0), Error);
  CHECK_THROWS_AS(euler_scheme(field, Vector::Zero(2), 1.0, 4),
                  DimMismatchError);
}

TEST_CASE("reference integrator hits known endpoints") {
  Vector x0(1);
  x0[0] = 1.0;
  const Vector end = reference_flow(decay_field(1), x0, 1.0, 1e-12);
  CHECK(std::abs(end[0] - 0.36787944117144233) <= 1e-12);

  Vector p0(2);
  p0 << 1.0, 0.0;
  const Vector rot = reference_flow(rotation_field(2), p0, 1.0, 1e-12);
  CHECK(std::abs(rot[0] - std::cos(1.0)) <= 1e-10);
  CHECK(std::abs(rot[1] - std::sin(1.0)) <= 1e-10);

  // T = 0 returns the start point unchanged
  CHECK((reference_flow(decay_field(2), Vector::Ones(2), 0.0, 1e-10) -
         Vector::Ones(2))
            .norm() == 0.0);
  CHECK_THROWS_AS(reference_flow(decay_field(1), x0, 1.0, 0.0), Error);
}

TEST_CASE("an unreachable tolerance raises the convergence error") {
  Vector x0(1);
  x0[0] = 1.0;
  CHECK_THROWS_AS(reference_flow(decay_field(1), x0, 1.0, 1e-30),
                  NoConvergenceError);
}

TEST_CASE("transport value combines flow endpoint and terminal") {
  FlowProblem problem = make_problem("decay", "relu-sum-g", 2, 1.0);
  Vector x(2);
  x << 1.0, 1.0;
  const double value = flow_operator_eval(problem, x, 1e-12);
  CHECK(std::abs(value - 2.0 * 0.36787944117144233) <= 1e-10);
}

TEST_CASE("a-priori Euler bound: frozen value and exact halving") {
  CHECK(euler_error_bound(1.0, 0.0, 1.0, 10, 1.0) == 2.9556224395722603);
  for (long long n : {5, 10, 20, 40, 123}) {
    CHECK(euler_error_bound(1.0, 0.0, 1.0, 2 * n, 1.0) * 2.0 ==
          euler_error_bound(1.0, 0.0, 1.0, n, 1.0));
    CHECK(euler_error_bound(0.7, 2.0, 1.5, 2 * n, 3.0) * 2.0 ==
          euler_error_bound(0.7, 2.0, 1.5, n, 3.0));
  }
  // L = 0 (constant-in-space field) makes the bound vanish
  CHECK(euler_error_bound(0.0, 1.0, 1.0, 8, 5.0) == 0.0);
}

TEST_CASE("Euler convergence verification on the decay field") {
  const VectorField field = decay_field(2);
  const std::vector<Vector> points = ball_points(2, 5.0, 8, 3);
  const ConvergenceReport report =
      verify_euler_convergence(field, points, 1.0, {8, 16, 32, 64, 128},
                               1e-10);
  CHECK(report.rows.size() == 8 * 5);
  for (const ConvergenceRow& row : report.rows) {
    CHECK(row.measured_error <= row.bound);
    CHECK(row.ratio <= 1.0);
  }
  REQUIRE(report.fitted_slope.has_value());
  CHECK(*report.fitted_slope <= -0.8);
  CHECK(*report.fitted_slope >= -1.2);
}

TEST_CASE("a zero field is integrated exactly and has no slope") {
  const VectorField field = rotation_field(1);  // no pair to rotate: f = 0
  CHECK(field.lipschitz_L == 0.0);
  const std::vector<Vector> points = ball_points(1, 5.0, 4, 4);
  const ConvergenceReport report =
      verify_euler_convergence(field, points, 1.0, {8, 64}, 1e-10);
  for (const ConvergenceRow& row : report.rows) {
    CHECK(row.measured_error == 0.0);
    CHECK(row.bound == 0.0);
    CHECK(row.ratio == 0.0);
  }
  CHECK_FALSE(report.fitted_slope.has_value());
}

TEST_CASE("understating the Lipschitz constant trips the bound check") {
  VectorField lying = decay_field(1);
  lying.eval = [](const Vector& x) { return Vector(-2.0 * x); };
  lying.lipschitz_L = 0.1;  // true constant is 2
  std::vector<Vector> points;
  Vector x(1);
  x[0] = 1.0;
  points.push_back(x);
  CHECK_THROWS_AS(
      verify_euler_convergence(lying, points, 1.0, {8, 16}, 1e-10),
      BoundViolatedError);
}

TEST_CASE("step-count lists are validated") {
  const VectorField field = decay_field(1);
  const std::vector<Vector> points = ball_points(1, 2.0, 2, 5);
  CHECK_THROWS_AS(verify_euler_convergence(field, points, 1.0, {8}, 1e-10),
                  Error);
  CHECK_THROWS_AS(
      verify_euler_convergence(field, points, 1.0, {16, 8}, 1e-10), Error);
  CHECK_THROWS_AS(
      verify_euler_convergence(field, points, 1.0, {8, 8}, 1e-10), Error);
}

TEST_CASE("convergence CSV carries comments, header and rows") {
  const VectorField field = decay_field(1);
  const std::vector<Vector> points = ball_points(1, 2.0, 2, 6);
  const ConvergenceReport report =
      verify_euler_convergence(field, points, 1.0, {8, 16}, 1e-10);
  const std::string csv = convergence_csv(report, {"alpha=1", "beta=two"});
  CHECK(csv.rfind("# alpha=1\n# beta=two\nx_id,n,measured_error,bound,ratio\n",
                  0) == 0);
  // one line per comment, plus header, plus one per row
  const auto lines = std::count(csv.begin(), csv.end(), '\n');
  CHECK(lines == 2 + 1 + static_cast<long>(report.rows.size()));
  // byte determinism
  CHECK(csv == convergence_csv(report, {"alpha=1", "beta=two"}));
}

TEST_CASE("field spot check accepts honest constants and rejects lies") {
  spot_check_field(decay_field(3), 5.0, 17);
  spot_check_field(rotation_field(4), 5.0, 18);

  VectorField lying_L = decay_field(2);
  lying_L.lipschitz_L = 0.5;
  CHECK_THROWS_AS(spot_check_field(lying_L, 5.0, 19), Error);

  VectorField lying_f0 = decay_field(2);
  lying_f0.eval = [](const Vector& x) {
    return Vector(Vector::Constant(x.size(), 5.0));
  };
  lying_f0.lipschitz_L = 1.0;
  lying_f0.f0_norm = 0.0;
  CHECK_THROWS_AS(spot_check_field(lying_f0, 5.0, 20), Error);
}
