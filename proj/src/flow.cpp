#include "anncalc/flow.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>
#include <utility>

#include <json.hpp>

#include "anncalc/algebra.hpp"
#include "anncalc/format.hpp"
#include "anncalc/parallel.hpp"

namespace anncalc {

namespace {

using Json = nlohmann::ordered_json;

void require_same_activation(const NetworkFamilyBuilder& a,
                             const NetworkFamilyBuilder& b) {
  if (a.activation.kind() != b.activation.kind() ||
      a.activation.slope() != b.activation.slope()) {
    throw Error("field and terminal builders must share an activation");
  }
}

void validate_config(const FlowBuildConfig& cfg) {
  if (!(cfg.eps > 0.0) || cfg.eps > 1.0) {
    throw Error("target accuracy must lie in (0, 1]");
  }
  if (cfg.T < 0.0) {
    throw Error("horizon must be >= 0");
  }
  if (!(cfg.kappa.kappa >= 1.0)) {
    throw Error("weight exponent kappa must be >= 1");
  }
  if (!(cfg.budget_split_disc > 0.0) || !(cfg.budget_split_disc < 1.0) ||
      !(cfg.budget_split_net > 0.0) || !(cfg.budget_split_net < 1.0) ||
      std::abs(cfg.budget_split_disc + cfg.budget_split_net - 1.0) > 1e-12) {
    throw Error("budget split fractions must lie in (0,1) and sum to 1");
  }
  if (cfg.n_cap < 1) {
    throw Error("step-count cap must be >= 1");
  }
}

double rate_eps_exponent(const DeclaredRates& rates, double kappa) {
  const double denom = 1.0 - rates.rho * kappa;
  if (!(denom > 0.0)) {
    throw Error("declared rates need rho*kappa < 1");
  }
  return 1.0 + 2.0 * rates.r0 * (kappa + 2.0) / denom;
}

double rate_d_exponent(const DeclaredRates& rates, double kappa) {
  const double denom = 1.0 - rates.rho * kappa;
  if (!(denom > 0.0)) {
    throw Error("declared rates need rho*kappa < 1");
  }
  return 8.0 * rates.iota + rates.alpha + 2.0 * rates.r1 +
         2.0 * rates.r0 * (rates.alpha * (kappa + 1.0) + rates.beta * kappa) /
             denom;
}

Json json_double(double v) {
  if (std::isnan(v)) {
    return Json("NaN");
  }
  if (std::isinf(v)) {
    return Json(v > 0 ? "Infinity" : "-Infinity");
  }
  return Json(v);
}

Json json_vector(const Vector& v) {
  Json arr = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    arr.push_back(json_double(v[i]));
  }
  return arr;
}

Json config_json(const FlowBuildConfig& cfg) {
  Json j;
  j["T"] = json_double(cfg.T);
  j["eps"] = json_double(cfg.eps);
  j["kappa"] = json_double(cfg.kappa.kappa);
  j["c"] = json_double(cfg.c);
  j["budget_split_disc"] = json_double(cfg.budget_split_disc);
  j["budget_split_net"] = json_double(cfg.budget_split_net);
  j["n_cap"] = cfg.n_cap;
  j["sample_plan"] = Json{{"rho_max", json_double(cfg.plan.rho_max)},
                          {"radial_steps", cfg.plan.radial_steps},
                          {"random_points", cfg.plan.random_points},
                          {"seed", cfg.plan.seed}};
  j["reference_tol"] = json_double(cfg.reference_tol);
  j["rates"] = Json{{"r0", json_double(cfg.rates.r0)},
                    {"r1", json_double(cfg.rates.r1)},
                    {"alpha", json_double(cfg.rates.alpha)},
                    {"beta", json_double(cfg.rates.beta)},
                    {"rho", json_double(cfg.rates.rho)},
                    {"iota", json_double(cfg.rates.iota)}};
  return j;
}

}  // namespace

long long choose_step_count(double L, double f0_norm, double T,
                            double eps_disc, double g_lipschitz,
                            double rho_max, double kappa, long long n_cap) {
  if (!(eps_disc > 0.0)) {
    throw Error("discretization budget must be positive");
  }
  if (n_cap < 1) {
    throw Error("step-count cap must be >= 1");
  }
  const double rhs = eps_disc * (1.0 + std::pow(rho_max, kappa));
  const auto admissible = [&](long long n) {
    return 2.0 * g_lipschitz * euler_error_bound(L, f0_norm, T, n, rho_max) <=
           rhs;
  };
  if (admissible(1)) {
    return 1;
  }
  // The bound scales exactly like 1/n, so invert it and then nudge to the
  // true boundary to be safe against rounding at the threshold.
  const double numerator =
      2.0 * g_lipschitz * euler_error_bound(L, f0_norm, T, 1, rho_max);
  const double target = numerator / rhs;
  if (!(target <= static_cast<double>(n_cap))) {
    throw CapExceededError("needs about " + format_double(target) +
                           " Euler steps, cap is " + std::to_string(n_cap));
  }
  long long n = std::max<long long>(1, static_cast<long long>(std::ceil(target)));
  while (n > 1 && admissible(n - 1)) {
    --n;
  }
  while (!admissible(n)) {
    ++n;
    if (n > n_cap) {
      throw CapExceededError("needs more than " + std::to_string(n_cap) +
                             " Euler steps");
    }
  }
  return n;
}

WeightedErrorReport weighted_sup_error(
    const Ann& net, const std::function<double(const Vector&)>& oracle,
    const WeightKappa& wk, const SamplePlan& plan, const Activation& act,
    std::uint64_t salt) {
  if (net.output_dim() != 1) {
    throw DimMismatchError("weighted sup error needs a scalar-output network");
  }
  const std::vector<Vector> samples =
      make_samples(plan, net.input_dim(), salt);
  Matrix points(net.input_dim(), static_cast<Eigen::Index>(samples.size()));
  for (std::size_t j = 0; j < samples.size(); ++j) {
    points.col(static_cast<Eigen::Index>(j)) = samples[j];
  }
  const Matrix outputs = realize_batch(net, act, points);

  WeightedErrorReport report;
  report.per_point.resize(samples.size());
  parallel_for(samples.size(), [&](std::size_t j) {
    FlowPoint row;
    row.x = samples[j];
    row.oracle = oracle(samples[j]);
    row.net_value = outputs(0, static_cast<Eigen::Index>(j));
    row.weighted_error = std::abs(row.oracle - row.net_value) *
                         weight_value(wk, samples[j].norm());
    report.per_point[j] = std::move(row);
  });

  report.argmax = samples.empty() ? Vector() : samples.front();
  for (const FlowPoint& row : report.per_point) {
    if (row.weighted_error > report.value) {
      report.value = row.weighted_error;
      report.argmax = row.x;
    }
  }
  return report;
}

FlowBuildReport build_flow_network(const NetworkFamilyBuilder& f_builder,
                                   const NetworkFamilyBuilder& g_builder,
                                   const FlowProblem& problem,
                                   const FlowBuildConfig& cfg) {
  validate_config(cfg);
  require_same_activation(f_builder, g_builder);
  spot_check_field(problem.field, cfg.plan.rho_max,
                   mix_seed(cfg.plan.seed, 0x51e1dULL));

  const int d = problem.field.dim;
  const Index index{d};
  const Activation& act = f_builder.activation;
  const double eps_disc = cfg.eps * cfg.budget_split_disc;
  const double eps_net = cfg.eps * cfg.budget_split_net;
  const double kappa = cfg.kappa.kappa;

  long long n = 0;
  std::vector<Ann> chain;
  if (problem.T > 0.0) {
    n = choose_step_count(problem.field.lipschitz_L, problem.field.f0_norm,
                          problem.T, eps_disc, problem.g_lipschitz,
                          cfg.plan.rho_max, kappa, cfg.n_cap);
    const double eps_f =
        eps_net / (2.0 * static_cast<double>(n) *
                   std::exp(cfg.c * problem.T * (1.0 + kappa)) *
                   std::max(problem.T, 1.0));
    const Ann step = euler_step_net(f_builder.build(index, eps_f),
                                    problem.T / static_cast<double>(n), act);
    chain.reserve(static_cast<std::size_t>(n) + 1);
    chain.push_back(g_builder.build(index, eps_net / 2.0));
    for (long long k = 0; k < n; ++k) {
      chain.push_back(step);
    }
  } else {
    chain.push_back(g_builder.build(index, eps_net / 2.0));
  }

  ComposedChain composed = compose_chain(chain);
  chain.clear();
  chain.shrink_to_fit();

  const auto oracle = [&problem, &cfg](const Vector& x) {
    return flow_operator_eval(problem, x, cfg.reference_tol);
  };
  WeightedErrorReport err =
      weighted_sup_error(composed.network, oracle, cfg.kappa, cfg.plan, act,
                         static_cast<std::uint64_t>(d));

  const long long params = composed.network.param_count();
  FlowBuildReport report{n,
                         std::move(composed.network),
                         params,
                         composed.report.upper_bound,
                         rate_eps_exponent(cfg.rates, kappa),
                         rate_d_exponent(cfg.rates, kappa),
                         err.value,
                         std::move(err.argmax),
                         std::move(err.per_point),
                         err.value <= cfg.eps};
  return report;
}

std::string flow_report_json(const FlowBuildReport& report,
                             const FlowBuildConfig& cfg,
                             const std::string& network_path) {
  Json doc;
  doc["n_chosen"] = report.n_chosen;
  doc["params"] = report.params;
  doc["chain_param_bound"] = report.chain_param_bound;
  doc["eps_exponent_bound"] = json_double(report.eps_exponent_bound);
  doc["d_exponent_bound"] = json_double(report.d_exponent_bound);
  doc["measured_weighted_error"] = json_double(report.measured_weighted_error);
  doc["argmax_point"] = json_vector(report.argmax_point);
  doc["pass"] = report.pass;
  Json per_point = Json::array();
  for (const FlowPoint& row : report.per_point) {
    per_point.push_back(Json{{"x", json_vector(row.x)},
                             {"oracle", json_double(row.oracle)},
                             {"net", json_double(row.net_value)},
                             {"weighted_error",
                              json_double(row.weighted_error)}});
  }
  doc["per_point"] = std::move(per_point);
  doc["network_path"] = network_path;
  doc["config"] = config_json(cfg);
  return doc.dump();
}

SweepTable sweep(const NetworkFamilyBuilder& f_builder,
                 const NetworkFamilyBuilder& g_builder,
                 const std::function<FlowProblem(int)>& problem_for_d,
                 const std::vector<int>& d_list,
                 const std::vector<double>& eps_list,
                 const FlowBuildConfig& cfg) {
  if (d_list.empty() || eps_list.empty()) {
    throw Error("sweep needs nonempty dimension and accuracy lists");
  }
  SweepTable table;
  table.rows.resize(d_list.size() * eps_list.size());
  // Cells run sequentially by default (ANN_CALC_THREADS opts in to more);
  // each cell's network is dropped before the next, bounding peak memory.
  parallel_for(table.rows.size(), [&](std::size_t flat) {
    const int d = d_list[flat / eps_list.size()];
    const double eps = eps_list[flat % eps_list.size()];
    FlowBuildConfig cell_cfg = cfg;
    cell_cfg.eps = eps;
    const FlowProblem problem = problem_for_d(d);
    const FlowBuildReport report =
        build_flow_network(f_builder, g_builder, problem, cell_cfg);
    SweepRow row;
    row.d = d;
    row.eps = eps;
    row.n = report.n_chosen;
    row.params = report.params;
    row.param_bound = report.chain_param_bound;
    row.weighted_error = report.measured_weighted_error;
    row.pass = report.pass;
    table.rows[flat] = row;
  });
  return table;
}

std::string sweep_csv(const SweepTable& table,
                      const std::vector<std::string>& config_comments) {
  std::ostringstream out;
  for (const std::string& line : config_comments) {
    out << "# " << line << '\n';
  }
  out << "d,eps,n,params,param_bound,weighted_error,pass\n";
  for (const SweepRow& row : table.rows) {
    out << row.d << ',' << format_double(row.eps) << ',' << row.n << ','
        << row.params << ',' << row.param_bound << ','
        << format_double(row.weighted_error) << ',' << (row.pass ? 1 : 0)
        << '\n';
  }
  return out.str();
}

ScalingFit fit_scaling_exponents(const SweepTable& table) {
  std::map<int, std::vector<std::pair<double, double>>> by_d;
  std::map<double, std::vector<std::pair<double, double>>> by_eps;
  for (const SweepRow& row : table.rows) {
    const double log_params = std::log(static_cast<double>(row.params));
    by_d[row.d].push_back({std::log(1.0 / row.eps), log_params});
    by_eps[row.eps].push_back({std::log(static_cast<double>(row.d)),
                               log_params});
  }
  if (by_d.size() < 3 || by_eps.size() < 3) {
    throw DegenerateFitError(
        "scaling fit needs >= 3 distinct values on each axis");
  }

  ScalingFit fit;
  fit.min_r_squared = 1.0;
  const auto run_fits = [&fit](const auto& groups,
                               std::vector<LineFit>& out) {
    double slope_sum = 0.0;
    for (const auto& [key, pairs] : groups) {
      (void)key;
      std::vector<double> xs, ys;
      for (const auto& [x, y] : pairs) {
        xs.push_back(x);
        ys.push_back(y);
      }
      const LineFit line = fit_line(xs, ys);
      slope_sum += line.slope;
      fit.min_r_squared = std::min(fit.min_r_squared, line.r_squared);
      out.push_back(line);
    }
    return slope_sum / static_cast<double>(groups.size());
  };
  fit.eps_exponent = run_fits(by_d, fit.eps_fits);
  fit.d_exponent = run_fits(by_eps, fit.d_fits);
  return fit;
}

}  // namespace anncalc
