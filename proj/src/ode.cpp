#include "anncalc/ode.hpp"

#include <cmath>
#include <random>
#include <sstream>
#include <string>

#include "anncalc/fit.hpp"
#include "anncalc/format.hpp"

namespace anncalc {

namespace {

constexpr long long kReferenceStepCap = 1LL << 20;

void require_dim(const VectorField& field, const Vector& x) {
  if (x.size() != field.dim) {
    throw DimMismatchError("point length " + std::to_string(x.size()) +
                           " != field dimension " +
                           std::to_string(field.dim));
  }
}

Vector rk4_endpoint(const VectorField& field, const Vector& x0, double T,
                    long long steps) {
  const double h = T / static_cast<double>(steps);
  Vector x = x0;
  Vector k1(x.size()), k2(x.size()), k3(x.size()), k4(x.size());
  Vector tmp(x.size());
  for (long long s = 0; s < steps; ++s) {
    k1 = field.eval(x);
    tmp = x + (0.5 * h) * k1;
    k2 = field.eval(tmp);
    tmp = x + (0.5 * h) * k2;
    k3 = field.eval(tmp);
    tmp = x + h * k3;
    k4 = field.eval(tmp);
    x += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }
  return x;
}

}  // namespace

Vector euler_scheme(const VectorField& field, const Vector& x0, double T,
                    long long n) {
  require_dim(field, x0);
  if (n < 1) {
    throw Error("euler_scheme needs n >= 1");
  }
  const double h = T / static_cast<double>(n);
  Vector x = x0;
  for (long long k = 0; k < n; ++k) {
    x += h * field.eval(x);
  }
  return x;
}

Vector reference_flow(const VectorField& field, const Vector& x0, double T,
                      double tol) {
  require_dim(field, x0);
  if (!(tol > 0.0)) {
    throw Error("reference_flow needs tol > 0");
  }
  if (T == 0.0) {
    return x0;
  }
  long long steps = 16;
  Vector prev = rk4_endpoint(field, x0, T, steps);
  while (steps * 2 <= kReferenceStepCap) {
    steps *= 2;
    Vector cur = rk4_endpoint(field, x0, T, steps);
    if ((cur - prev).norm() < tol) {
      return cur;
    }
    prev = std::move(cur);
  }
  throw NoConvergenceError(
      "reference flow did not stabilize to " + format_double(tol) +
      " within " + std::to_string(kReferenceStepCap) + " steps");
}

double flow_operator_eval(const FlowProblem& problem, const Vector& x,
                          double tol) {
  return problem.terminal(reference_flow(problem.field, x, problem.T, tol));
}

double euler_error_bound(double L, double f0_norm, double T, long long n,
                         double x_norm) {
  return (1.0 / static_cast<double>(n)) * std::max(L, 1.0) * L * T * T *
         (T + 1.0) * std::exp(2.0 * L * T) * std::max(f0_norm, 1.0) *
         (1.0 + x_norm);
}

ConvergenceReport verify_euler_convergence(const VectorField& field,
                                           const std::vector<Vector>& points,
                                           double T,
                                           const std::vector<long long>& n_list,
                                           double tol) {
  if (n_list.size() < 2) {
    throw Error("verify_euler_convergence needs at least two step counts");
  }
  for (std::size_t k = 0; k + 1 < n_list.size(); ++k) {
    if (n_list[k] >= n_list[k + 1]) {
      throw Error("step counts must be strictly increasing");
    }
  }

  ConvergenceReport report;
  std::vector<double> log_n, log_err;
  for (std::size_t i = 0; i < points.size(); ++i) {
    const Vector& x = points[i];
    const Vector ref = reference_flow(field, x, T, tol);
    for (long long n : n_list) {
      const Vector approx = euler_scheme(field, x, T, n);
      const double err = (ref - approx).norm();
      const double bound = euler_error_bound(field.lipschitz_L, field.f0_norm,
                                             T, n, x.norm());
      if (err > bound) {
        throw BoundViolatedError(
            "Euler error " + format_double(err) + " exceeds bound " +
            format_double(bound) + " at point " + std::to_string(i) +
            ", n = " + std::to_string(n) +
            " (wrong declared constants or an integrator bug)");
      }
      ConvergenceRow row;
      row.x_id = static_cast<int>(i);
      row.n = n;
      row.measured_error = err;
      row.bound = bound;
      row.ratio = bound > 0.0 ? err / bound : 0.0;
      report.rows.push_back(row);
      if (err > 0.0) {
        log_n.push_back(std::log(static_cast<double>(n)));
        log_err.push_back(std::log(err));
      }
    }
  }

  if (log_n.size() >= 2) {
    try {
      const LineFit fit = fit_line(log_n, log_err);
      report.fitted_slope = fit.slope;
      report.r_squared = fit.r_squared;
    } catch (const DegenerateFitError&) {
      // all surviving rows share one n; leave the slope absent
    }
  }
  return report;
}

std::string convergence_csv(const ConvergenceReport& report,
                            const std::vector<std::string>& config_comments) {
  std::ostringstream out;
  for (const std::string& line : config_comments) {
    out << "# " << line << '\n';
  }
  out << "x_id,n,measured_error,bound,ratio\n";
  for (const ConvergenceRow& row : report.rows) {
    out << row.x_id << ',' << row.n << ',' << format_double(row.measured_error)
        << ',' << format_double(row.bound) << ',' << format_double(row.ratio)
        << '\n';
  }
  return out.str();
}

void spot_check_field(const VectorField& field, double radius,
                      std::uint64_t seed) {
  const Vector f0 = field.eval(Vector::Zero(field.dim));
  if (f0.norm() > field.f0_norm + 1e-9) {
    throw Error("declared f0_norm " + format_double(field.f0_norm) +
                " below actual ||f(0)|| = " + format_double(f0.norm()));
  }
  std::mt19937_64 gen(seed);
  const auto draw = [&]() {
    Vector v(field.dim);
    for (int i = 0; i < field.dim; ++i) {
      const double u = static_cast<double>((gen() >> 11) + 1) * 0x1.0p-53;
      v[i] = radius * (2.0 * u - 1.0);
    }
    return v;
  };
  for (int pair = 0; pair < 64; ++pair) {
    const Vector x = draw();
    const Vector y = draw();
    const double lhs = (field.eval(x) - field.eval(y)).norm();
    const double rhs = field.lipschitz_L * (x - y).norm() + 1e-9;
    if (lhs > rhs) {
      throw Error("field violates its declared Lipschitz constant " +
                  format_double(field.lipschitz_L) + ": ||f(x)-f(y)|| = " +
                  format_double(lhs) + " > " + format_double(rhs));
    }
  }
}

}  // namespace anncalc
