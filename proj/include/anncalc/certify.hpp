#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "anncalc/network.hpp"
#include "anncalc/sampling.hpp"

namespace anncalc {

// Grid point in a finite enumerated index set. Composite constructions
// extend an index on the right (e.g. appending a step count), so related
// grids stay prefix-compatible.
using Index = std::vector<long long>;

// Finite index set with its dimension bookkeeping: dim_map assigns each
// index a positive vector of length dim_count, io_map the input/output
// widths that both function families and built networks must match.
struct IndexGrid {
  std::vector<Index> indices;
  std::function<std::vector<long long>(const Index&)> dim_map;
  int dim_count = 1;
  std::function<std::pair<int, int>(const Index&)> io_map;
};

// Indexed collection of target functions f_i : R^in -> R^out.
struct FunctionFamily {
  std::function<Vector(const Index&, const Vector&)> eval;
};

// Parameter budget P <= K * eps^{-r0} * prod_l dims[l]^{r_l}.
struct GrowthBudget {
  double K = 0.0;
  double r0 = 0.0;
  std::vector<double> r;
};

double budget_value(const GrowthBudget& budget, double eps,
                    const std::vector<long long>& dims);

// Linear-growth certificate ||net(x)|| <= G*(H + ||x||). G and H may return
// +infinity, which disables the growth clause ("unconstrained") rather than
// failing it. rho and beta are the declared growth exponents of H^kappa in
// eps and in the dimensions, consumed by the rate-exponent reports.
struct GrowthEnvelope {
  std::function<double(const Index&, double)> G;
  std::function<double(const Index&, double)> H;
  double rho = 0.0;
  std::vector<double> beta;
};

// Weight w(v) = (1 + v^kappa)^{-1} used for weighted sup-norm errors.
struct WeightKappa {
  double kappa = 1.0;
};

double weight_value(const WeightKappa& wk, double v);

// A constructive witness family: for every (index, eps) a concrete network
// meeting the grid's io dims. Determinism is required: the same arguments
// must yield the same network.
struct NetworkFamilyBuilder {
  std::function<Ann(const Index&, double)> build;
  Activation activation = Activation::rectifier();
  std::optional<GrowthEnvelope> envelope;
};

struct CertRow {
  Index index;
  double eps = 0.0;
  long long params = 0;
  double budget = 0.0;
  double weighted_error = 0.0;
  std::optional<bool> growth_ok;  // absent when the envelope is unbounded
  bool row_pass = false;
};

struct CertReport {
  double fitted_K = 0.0;
  bool pass = false;
  double worst_error = 0.0;
  std::vector<CertRow> rows;
  SamplePlan plan;
};

// Empirical membership check over the full (index, eps) grid: parameter
// count against the budget, weighted sup error (max over the sample plan of
// w(||x||)*||f_i(x) - net(x)||) against eps, and the envelope clause when
// bounded. Networks with non-finite weights fail their rows. fitted_K is
// the smallest constant making the parameter clause hold on this grid:
// max over rows of params * eps^{r0} * prod dims^{-r_l}.
CertReport check_membership(const NetworkFamilyBuilder& builder,
                            const FunctionFamily& family,
                            const GrowthBudget& budget, const WeightKappa& wk,
                            const IndexGrid& grid,
                            const std::vector<double>& eps_list,
                            const SamplePlan& plan);

std::string cert_report_json(const CertReport& report);

// Accuracy-splitting combinator for lambda*f + g: the f operand is built at
// eps/(2*max{|lambda|,1}), the g operand at eps/2, and the results combined
// with linear_combination, so the triangle inequality delivers error <= eps.
NetworkFamilyBuilder combinator_linear(const NetworkFamilyBuilder& bf,
                                       const NetworkFamilyBuilder& bg,
                                       double lambda, const Activation& act);

// Step count for the limit combinator: smallest integer n >=
// (D * (2/delta) * prod dims^{alpha_l})^{1/R}, at least 1.
long long limit_step_count(double D, double R,
                           const std::vector<double>& alpha,
                           const std::vector<long long>& dims, double delta);

// Builds the n-th family member at accuracy delta/2 with n chosen by
// limit_step_count at deviation budget delta/2, for target families that the
// n-th members approach at declared rate D * n^{-R} * prod dims^{alpha_l}.
// Throws NonpositiveRError when R <= 0.
NetworkFamilyBuilder combinator_limit(
    const std::function<NetworkFamilyBuilder(long long)>& builders_by_n,
    double D, double R, const std::vector<double>& alpha,
    const std::function<std::vector<long long>(const Index&)>& dim_map);

// Declared convergence rate of a builder family: weighted error <=
// K_rate * eps^R * prod dims^{alpha_l} at parameter cost
// <= K * eps^{-r0} * prod dims^{r_l}.
struct RateDeclaration {
  double R = 1.0;
  std::vector<double> alpha;
  double r0 = 0.0;
  std::vector<double> r;
};

// Budget with the exponents implied by reparametrizing a rate declaration
// to plain accuracy eps: r0/R and r_l + r0*alpha_l/R.
GrowthBudget implied_budget(const RateDeclaration& rate, double budget_K);

// Runs check_membership against the implied budget.
CertReport certify_from_rate(const NetworkFamilyBuilder& builder,
                             const RateDeclaration& rate, double budget_K,
                             const FunctionFamily& family,
                             const WeightKappa& wk, const IndexGrid& grid,
                             const std::vector<double>& eps_list,
                             const SamplePlan& plan);

// Composition of builder families plus its telescoped error prediction.
struct ComposedFamily {
  NetworkFamilyBuilder builder;
  // sup over a 256-point radius grid in [0, rho_max] of
  // w(v) * sum_k (prod_{l>k} L_l) * (1 + B_{k-1}(v)^kappa), where B_k
  // propagates v through the factor envelopes; +infinity when a needed
  // envelope is missing or unbounded.
  std::function<double(const Index&, double)> predicted_multiplier;
};

// Composes factor builders (factors[0] applied first) at a SHARED accuracy:
// build(i, eps) feeds the same eps to every factor. lipschitz[k-1] is the
// Lipschitz constant of factors[k]'s target (one entry per factor after the
// first); missing entries raise MissingLipschitzError.
ComposedFamily combinator_compose_chain(
    const std::vector<NetworkFamilyBuilder>& factors,
    const std::vector<double>& lipschitz, const WeightKappa& wk,
    double rho_max, const Activation& act);

// Euler-step family over an endomorphic builder: the extended index appends
// the step count n, and build(i ++ [n], eps) wraps bf.build(i,
// eps/max{T,1}) in euler_step_net with step T/n. The attached envelope is
// G' = 1 + c*T/n, H' = H at the rescaled accuracy.
NetworkFamilyBuilder combinator_euler_family(const NetworkFamilyBuilder& bf,
                                             double T, double c,
                                             const Activation& act);

// Product family over extended indices (i ++ [j]): evaluates families[j] at
// the prefix index i.
FunctionFamily product_family(const std::vector<FunctionFamily>& families);

// Concatenated dimension map over a split index: the first len1 entries go
// to d1, the remainder to d2.
std::function<std::vector<long long>(const Index&)> product_dim_map(
    const std::function<std::vector<long long>(const Index&)>& d1, int len1,
    const std::function<std::vector<long long>(const Index&)>& d2);

}  // namespace anncalc
