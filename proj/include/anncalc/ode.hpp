#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "anncalc/network.hpp"

namespace anncalc {

// A globally Lipschitz vector field together with its declared constants.
// lipschitz_L and f0_norm (= ||f(0)||) feed the Euler error bound; they are
// caller-asserted and can be spot-checked with spot_check_field.
struct VectorField {
  int dim = 0;
  std::function<Vector(const Vector&)> eval;
  double lipschitz_L = 0.0;
  double f0_norm = 0.0;
};

// Transport problem: the value u(T, x) = g(X_T^x) where X is the flow of
// `field` and g the terminal condition.
struct FlowProblem {
  VectorField field;
  std::function<double(const Vector&)> terminal;
  double T = 0.0;
  double g_lipschitz = 0.0;
};

// Explicit Euler endpoint after exactly n steps of size T/n.
Vector euler_scheme(const VectorField& field, const Vector& x0, double T,
                    long long n);

// High-accuracy flow endpoint: classical 4th-order one-step integration
// with global step halving until successive endpoints differ by less than
// tol. Serves as the ground-truth oracle for every error measurement.
// Throws NoConvergenceError past 2^20 steps.
Vector reference_flow(const VectorField& field, const Vector& x0, double T,
                      double tol);

// g(X_T^x): the transport-equation solution value at (T, x).
double flow_operator_eval(const FlowProblem& problem, const Vector& x,
                          double tol);

// Explicit a-priori Euler global error bound
// (1/n) * max{L,1} * L * T^2 * (T+1) * e^{2LT} * max{f0_norm,1} * (1+x_norm).
double euler_error_bound(double L, double f0_norm, double T, long long n,
                         double x_norm);

struct ConvergenceRow {
  int x_id = 0;
  long long n = 0;
  double measured_error = 0.0;
  double bound = 0.0;
  double ratio = 0.0;  // measured / bound; 0 when the bound is 0
};

struct ConvergenceReport {
  std::vector<ConvergenceRow> rows;
  // Pooled log-log slope of error vs n over points with nonzero error;
  // absent when every measured error is zero (exact schemes).
  std::optional<double> fitted_slope;
  double r_squared = 0.0;
};

// Measures ||X_T^x - Euler_n(x)|| against reference_flow for every point and
// step count, asserts each measurement under euler_error_bound (throwing
// BoundViolatedError with the offending point otherwise), and fits the
// convergence slope.
ConvergenceReport verify_euler_convergence(const VectorField& field,
                                           const std::vector<Vector>& points,
                                           double T,
                                           const std::vector<long long>& n_list,
                                           double tol);

// CSV with one row per (point, n); config_comments are emitted first as
// '#'-prefixed lines, then the single header line.
std::string convergence_csv(const ConvergenceReport& report,
                            const std::vector<std::string>& config_comments);

// Randomized guard against grossly misdeclared constants: checks
// ||f(x)-f(y)|| <= L||x-y|| + 1e-9 on sampled pairs inside the given radius
// and ||f(0)|| <= f0_norm + 1e-9. Throws Error on violation.
void spot_check_field(const VectorField& field, double radius,
                      std::uint64_t seed);

}  // namespace anncalc
