#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "anncalc/certify.hpp"
#include "anncalc/fit.hpp"
#include "anncalc/ode.hpp"

namespace anncalc {

// Declared constants of the builder families feeding the rate-exponent
// report: parameter growth c*eps^{-r0}*d^{r1}, field data ||f(0)|| <=
// c*d^alpha, network growth ||net(x)|| <= c*(eps^{-rho}*d^beta + ||x||),
// and input-dim growth d <= c*d^iota (iota = 1 for the identity dimension
// map).
struct DeclaredRates {
  double r0 = 0.0;
  double r1 = 2.0;
  double alpha = 0.0;
  double beta = 0.0;
  double rho = 0.0;
  double iota = 1.0;
};

struct FlowBuildConfig {
  double T = 1.0;
  double eps = 0.1;
  WeightKappa kappa;
  // Shared Lipschitz/growth constant of the canonical problem family.
  double c = 1.0;
  // Fractions of eps granted to time discretization and to network error.
  double budget_split_disc = 0.5;
  double budget_split_net = 0.5;
  long long n_cap = 65536;
  SamplePlan plan;
  double reference_tol = 1e-10;
  DeclaredRates rates;
};

// Smallest n <= n_cap with
//   2 * g_lipschitz * euler_error_bound(L, f0_norm, T, n, rho_max)
//     <= eps_disc * (1 + rho_max^kappa).
// The factor 2 covers sup_{v>=0} (1+v)/(1+v^kappa) <= 2 for kappa >= 1, so
// for kappa = 1 the rule makes the weighted discretization error at most
// eps_disc/2 at every sampled radius. Throws CapExceededError.
long long choose_step_count(double L, double f0_norm, double T,
                            double eps_disc, double g_lipschitz,
                            double rho_max, double kappa, long long n_cap);

struct FlowPoint {
  Vector x;
  double oracle = 0.0;
  double net_value = 0.0;
  double weighted_error = 0.0;
};

struct WeightedErrorReport {
  double value = 0.0;
  Vector argmax;
  std::vector<FlowPoint> per_point;
};

// Max over the sample plan of |oracle(x) - realize(net)(x)| * w(||x||) for a
// scalar-output network, with the argmax point and the full per-point table.
WeightedErrorReport weighted_sup_error(
    const Ann& net, const std::function<double(const Vector&)>& oracle,
    const WeightKappa& wk, const SamplePlan& plan, const Activation& act,
    std::uint64_t salt);

struct FlowBuildReport {
  long long n_chosen = 0;
  Ann network;
  long long params = 0;
  long long chain_param_bound = 0;
  double eps_exponent_bound = 0.0;
  double d_exponent_bound = 0.0;
  double measured_weighted_error = 0.0;
  Vector argmax_point;
  std::vector<FlowPoint> per_point;
  bool pass = false;
};

// Materializes a network approximating u(T, .) = g(flow of f at time T):
// splits eps per budget_split into discretization and network budgets,
// picks n with choose_step_count, builds one Euler-step factor from
// f_builder at the telescoped accuracy eps_net/(2*n*e^{cT(1+kappa)}*
// max{T,1}), composes n copies under g_builder's network (built at
// eps_net/2), and measures the weighted sup error against the reference
// flow oracle. With T = 0 the network is the g-network alone. Builders are
// indexed by {d} with d = problem.field.dim.
FlowBuildReport build_flow_network(const NetworkFamilyBuilder& f_builder,
                                   const NetworkFamilyBuilder& g_builder,
                                   const FlowProblem& problem,
                                   const FlowBuildConfig& cfg);

// Build report JSON (everything but the network itself, which is saved
// separately at network_path; pass an empty string when not saved).
std::string flow_report_json(const FlowBuildReport& report,
                             const FlowBuildConfig& cfg,
                             const std::string& network_path);

struct SweepRow {
  int d = 0;
  double eps = 0.0;
  long long n = 0;
  long long params = 0;
  long long param_bound = 0;
  double weighted_error = 0.0;
  bool pass = false;
};

struct SweepTable {
  std::vector<SweepRow> rows;
};

// One build per (d, eps) cell; rows ordered by (d_list, eps_list) input
// order. Networks are discarded after measurement, so peak memory is one
// cell.
SweepTable sweep(const NetworkFamilyBuilder& f_builder,
                 const NetworkFamilyBuilder& g_builder,
                 const std::function<FlowProblem(int)>& problem_for_d,
                 const std::vector<int>& d_list,
                 const std::vector<double>& eps_list,
                 const FlowBuildConfig& cfg);

// CSV with '#'-prefixed config comment lines above the single header line
// "d,eps,n,params,param_bound,weighted_error,pass".
std::string sweep_csv(const SweepTable& table,
                      const std::vector<std::string>& config_comments);

// Log-log parameter scaling fits: params vs 1/eps at each fixed d and
// params vs d at each fixed eps; the headline exponents are the means of
// the per-fit slopes. Throws DegenerateFitError unless both axes carry >= 3
// distinct values.
struct ScalingFit {
  std::vector<LineFit> eps_fits;
  std::vector<LineFit> d_fits;
  double eps_exponent = 0.0;
  double d_exponent = 0.0;
  double min_r_squared = 0.0;
};

ScalingFit fit_scaling_exponents(const SweepTable& table);

}  // namespace anncalc
