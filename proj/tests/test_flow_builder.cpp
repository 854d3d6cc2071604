#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include <json.hpp>

#include "anncalc/canonical.hpp"
#include "anncalc/flow.hpp"

using namespace anncalc;

namespace {

FlowBuildConfig small_config(double eps, double radius, int samples,
                             std::uint64_t seed) {
  FlowBuildConfig cfg;
  cfg.T = 1.0;
  cfg.eps = eps;
  cfg.plan.rho_max = radius;
  cfg.plan.radial_steps = 4;
  cfg.plan.random_points = samples;
  cfg.plan.seed = seed;
  return cfg;
}

}  // namespace

TEST_CASE("step-count selection: frozen value, minimality, edge cases") {
  // decay-style constants; the (1 + rho) factors cancel, leaving
  // target = 2 * 2 * (T+1) * e^2 / eps_disc
  CHECK(choose_step_count(1.0, 0.0, 1.0, 0.1, 1.0, 1.0, 1.0, 65536) == 296);
  CHECK(choose_step_count(1.0, 0.0, 1.0, 0.1, 1.0, 2.0, 1.0, 65536) == 296);

  // a zero field or zero horizon needs a single step
  CHECK(choose_step_count(0.0, 1.0, 1.0, 0.01, 1.0, 5.0, 1.0, 65536) == 1);
  CHECK(choose_step_count(1.0, 0.0, 0.0, 0.01, 1.0, 5.0, 1.0, 65536) == 1);

  CHECK_THROWS_AS(choose_step_count(1.0, 0.0, 1.0, 1e-6, 1.0, 1.0, 1.0, 10),
                  CapExceededError);
  CHECK_THROWS_AS(choose_step_count(1.0, 0.0, 1.0, 0.0, 1.0, 1.0, 1.0, 10),
                  Error);

  // minimality: n is admissible, n-1 is not
  std::mt19937_64 gen(202);
  std::uniform_real_distribution<double> Ld(0.1, 1.5), ed(0.01, 0.5),
      gd(0.5, 3.0), rd(0.5, 8.0);
  for (int trial = 0; trial < 30; ++trial) {
    const double L = Ld(gen), eps_disc = ed(gen), g = gd(gen), rho = rd(gen);
    const long long n =
        choose_step_count(L, 0.5, 1.0, eps_disc, g, rho, 1.0, 1 << 24);
    const double rhs = eps_disc * (1.0 + rho);
    const auto lhs = [&](long long m) {
      return 2.0 * g * euler_error_bound(L, 0.5, 1.0, m, rho);
    };
    CHECK(lhs(n) <= rhs);
    if (n > 1) {
      CHECK(lhs(n - 1) > rhs);
    }
  }
}

TEST_CASE("weighted sup error against a shifted oracle") {
  const Ann net = coord_g_net(2);  // x |-> x_0
  SamplePlan plan;
  plan.rho_max = 5.0;
  plan.radial_steps = 4;
  plan.random_points = 32;
  const auto oracle = [](const Vector& x) { return x[0] + 0.1; };
  const WeightedErrorReport report = weighted_sup_error(
      net, oracle, WeightKappa{1.0}, plan, Activation::rectifier(), 0);
  // constant gap 0.1 is weighted hardest at the origin where w = 1
  CHECK(report.value == 0.1);
  CHECK(report.argmax.norm() == 0.0);
  CHECK(report.per_point.size() == 1 + 2 * 2 * 4 + 32);

  CHECK_THROWS_AS(
      weighted_sup_error(decay_f_net(2), oracle, WeightKappa{1.0}, plan,
                         Activation::rectifier(), 0),
      DimMismatchError);
}

TEST_CASE("flow network build: frozen step count and passing error") {
  const FlowProblem problem = make_problem("decay", "relu-sum-g", 1, 1.0);
  const FlowBuildConfig cfg = small_config(0.2, 2.0, 64, 0);
  const FlowBuildReport report =
      build_flow_network(canonical_f_builder("decay"),
                         canonical_g_builder("relu-sum-g"), problem, cfg);
  CHECK(report.n_chosen == 296);
  CHECK(report.pass);
  CHECK(report.measured_weighted_error <= 0.2);
  CHECK(report.measured_weighted_error > 0.0);  // discretization is visible
  CHECK(report.params == report.network.param_count());
  CHECK(report.params <= report.chain_param_bound);
  CHECK(report.network.input_dim() == 1);
  CHECK(report.network.output_dim() == 1);
  // default declared rates
  CHECK(report.eps_exponent_bound == 1.0);
  CHECK(report.d_exponent_bound == 12.0);
  CHECK(report.per_point.size() == 1 + 2 * 4 + 64);
}

TEST_CASE("zero horizon reduces to the terminal network") {
  const FlowProblem problem = make_problem("decay", "relu-sum-g", 3, 0.0);
  FlowBuildConfig cfg = small_config(0.5, 2.0, 16, 0);
  cfg.T = 0.0;
  const FlowBuildReport report =
      build_flow_network(canonical_f_builder("decay"),
                         canonical_g_builder("relu-sum-g"), problem, cfg);
  CHECK(report.n_chosen == 0);
  CHECK(report.pass);
  CHECK(report.measured_weighted_error == 0.0);  // the readout is exact
  CHECK(structurally_equal(report.network, relu_sum_g_net(3)));
}

TEST_CASE("build reports are byte-identical across repeated runs") {
  const FlowProblem problem = make_problem("rotation", "coord-g", 2, 1.0);
  const FlowBuildConfig cfg = small_config(0.25, 2.0, 24, 5);
  const FlowBuildReport a =
      build_flow_network(canonical_f_builder("rotation"),
                         canonical_g_builder("coord-g"), problem, cfg);
  const FlowBuildReport b =
      build_flow_network(canonical_f_builder("rotation"),
                         canonical_g_builder("coord-g"), problem, cfg);
  CHECK(structurally_equal(a.network, b.network));
  const std::string ja = flow_report_json(a, cfg, "net.json");
  const std::string jb = flow_report_json(b, cfg, "net.json");
  CHECK(ja == jb);
  CHECK(ja.rfind("{\"n_chosen\":", 0) == 0);
  const auto doc = nlohmann::json::parse(ja);
  CHECK(doc["pass"].get<bool>() == a.pass);
  CHECK(doc["network_path"].get<std::string>() == "net.json");
  CHECK(doc["config"]["eps"].get<double>() == 0.25);
  CHECK(doc["per_point"].size() == a.per_point.size());
}

TEST_CASE("config validation rejects out-of-range settings") {
  const FlowProblem problem = make_problem("decay", "relu-sum-g", 1, 1.0);
  const auto fb = canonical_f_builder("decay");
  const auto gb = canonical_g_builder("relu-sum-g");

  FlowBuildConfig bad = small_config(0.0, 2.0, 8, 0);
  CHECK_THROWS_AS(build_flow_network(fb, gb, problem, bad), Error);
  bad = small_config(1.5, 2.0, 8, 0);
  CHECK_THROWS_AS(build_flow_network(fb, gb, problem, bad), Error);
  bad = small_config(0.5, 2.0, 8, 0);
  bad.kappa.kappa = 0.5;
  CHECK_THROWS_AS(build_flow_network(fb, gb, problem, bad), Error);
  bad = small_config(0.5, 2.0, 8, 0);
  bad.budget_split_disc = 0.3;
  bad.budget_split_net = 0.3;
  CHECK_THROWS_AS(build_flow_network(fb, gb, problem, bad), Error);
  bad = small_config(0.5, 2.0, 8, 0);
  bad.n_cap = 0;
  CHECK_THROWS_AS(build_flow_network(fb, gb, problem, bad), Error);

  // builders must agree on the activation
  auto leaky_g = gb;
  leaky_g.activation = Activation::leaky_rectifier(0.1);
  CHECK_THROWS_AS(
      build_flow_network(fb, leaky_g, problem, small_config(0.5, 2.0, 8, 0)),
      Error);
}

TEST_CASE("misdeclared field constants are caught before building") {
  FlowProblem lying = make_problem("decay", "relu-sum-g", 2, 1.0);
  lying.field.lipschitz_L = 0.25;  // true constant is 1
  CHECK_THROWS_AS(
      build_flow_network(canonical_f_builder("decay"),
                         canonical_g_builder("relu-sum-g"), lying,
                         small_config(0.5, 5.0, 8, 0)),
      Error);
}

TEST_CASE("sweep tables are ordered, passing and reproducible") {
  const FlowBuildConfig cfg = small_config(0.5, 2.0, 16, 1);
  const auto problem_for_d = [](int d) {
    return make_problem("decay", "relu-sum-g", d, 1.0);
  };
  const SweepTable table =
      sweep(canonical_f_builder("decay"), canonical_g_builder("relu-sum-g"),
            problem_for_d, {1, 2}, {0.5, 0.25}, cfg);
  REQUIRE(table.rows.size() == 4);
  CHECK(table.rows[0].d == 1);
  CHECK(table.rows[0].eps == 0.5);
  CHECK(table.rows[1].d == 1);
  CHECK(table.rows[1].eps == 0.25);
  CHECK(table.rows[2].d == 2);
  CHECK(table.rows[3].d == 2);
  for (const SweepRow& row : table.rows) {
    CHECK(row.pass);
    CHECK(row.weighted_error <= row.eps);
    CHECK(row.params <= row.param_bound);
    CHECK(row.n >= 1);
  }
  // shrinking eps cannot shrink the step count
  CHECK(table.rows[1].n >= table.rows[0].n);

  const std::string csv = sweep_csv(table, {"k=v"});
  CHECK(csv.rfind("# k=v\nd,eps,n,params,param_bound,weighted_error,pass\n",
                  0) == 0);
  const SweepTable again =
      sweep(canonical_f_builder("decay"), canonical_g_builder("relu-sum-g"),
            problem_for_d, {1, 2}, {0.5, 0.25}, cfg);
  CHECK(sweep_csv(again, {"k=v"}) == csv);

  CHECK_THROWS_AS(sweep(canonical_f_builder("decay"),
                        canonical_g_builder("relu-sum-g"), problem_for_d, {},
                        {0.5}, cfg),
                  Error);
}

TEST_CASE("scaling fit recovers planted exponents") {
  SweepTable table;
  for (int d : {1, 2, 4, 8}) {
    for (double eps : {1.0, 0.5, 0.25}) {
      SweepRow row;
      row.d = d;
      row.eps = eps;
      // params = 7 * d^3 / eps^2 exactly
      row.params = static_cast<long long>(
          7.0 * d * d * d / (eps * eps));
      table.rows.push_back(row);
    }
  }
  const ScalingFit fit = fit_scaling_exponents(table);
  CHECK(fit.eps_exponent == doctest::Approx(2.0).epsilon(1e-9));
  CHECK(fit.d_exponent == doctest::Approx(3.0).epsilon(1e-9));
  CHECK(fit.min_r_squared >= 0.999999);
  CHECK(fit.eps_fits.size() == 4);
  CHECK(fit.d_fits.size() == 3);

  SweepTable thin;
  for (int d : {1, 2}) {
    for (double eps : {1.0, 0.5, 0.25}) {
      SweepRow row;
      row.d = d;
      row.eps = eps;
      row.params = 10;
      thin.rows.push_back(row);
    }
  }
  CHECK_THROWS_AS(fit_scaling_exponents(thin), DegenerateFitError);
}

TEST_CASE("problem catalogue: pairings and validation") {
  CHECK(paired_terminal("decay") == "relu-sum-g");
  CHECK(paired_terminal("rotation") == "coord-g");
  CHECK_THROWS_AS(paired_terminal("nope"), Error);
  CHECK_THROWS_AS(make_problem("decay", "relu-sum-g", 0, 1.0), Error);
  CHECK_THROWS_AS(make_problem("decay", "relu-sum-g", 2, -1.0), Error);
  CHECK_THROWS_AS(make_problem("what", "relu-sum-g", 2, 1.0), Error);
  CHECK_THROWS_AS(make_problem("decay", "what", 2, 1.0), Error);

  const FlowProblem p = make_problem("decay", "relu-sum-g", 4, 1.0);
  CHECK(p.g_lipschitz == 2.0);  // sqrt(d)
  const FlowProblem q = make_problem("rotation", "coord-g", 4, 1.0);
  CHECK(q.g_lipschitz == 1.0);
  CHECK(q.field.lipschitz_L == 1.0);
  CHECK(make_problem("rotation", "coord-g", 1, 1.0).field.lipschitz_L == 0.0);
}

TEST_CASE("canonical networks realize their target functions exactly") {
  std::mt19937_64 gen(301);
  std::uniform_real_distribution<double> coord(-3.0, 3.0);
  const Activation relu = Activation::rectifier();
  for (int d : {1, 2, 5}) {
    const VectorField decay = decay_field(d);
    const VectorField rot = rotation_field(d);
    for (int trial = 0; trial < 10; ++trial) {
      Vector x(d);
      for (int i = 0; i < d; ++i) {
        x[i] = coord(gen);
      }
      CHECK((realize(decay_f_net(d), relu, x) - decay.eval(x)).norm() == 0.0);
      CHECK((realize(rotation_f_net(d), relu, x) - rot.eval(x)).norm() ==
            0.0);
      CHECK(std::abs(realize(relu_sum_g_net(d), relu, x)[0] - relu_sum(x)) <=
            1e-13);
      CHECK(realize(coord_g_net(d), relu, x)[0] == x[0]);
    }
  }
  CHECK(relu_sum_g_net(3).dims() == std::vector<int>{3, 3, 1});
  CHECK_THROWS_AS(canonical_f_builder("unknown"), Error);
  CHECK_THROWS_AS(canonical_g_builder("unknown"), Error);
}
