#include "anncalc/fit.hpp"

#include <cmath>
#include <cstddef>
#include <string>

namespace anncalc {

LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size()) {
    throw DegenerateFitError("fit_line: x and y lengths differ");
  }
  const std::size_t n = x.size();
  if (n < 2) {
    throw DegenerateFitError("fit_line needs at least two points, got " +
                             std::to_string(n));
  }
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);

  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = x[i] - mx;
    const double dy = y[i] - my;
    sxx += dx * dx;
    sxy += dx * dy;
    syy += dy * dy;
  }
  if (!(sxx > 0.0)) {
    throw DegenerateFitError("fit_line: zero variance in x");
  }

  LineFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  fit.n = static_cast<int>(n);

  double ss_res = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = y[i] - (fit.intercept + fit.slope * x[i]);
    ss_res += r * r;
  }
  if (syy > 0.0) {
    fit.r_squared = 1.0 - ss_res / syy;
  } else {
    // Flat data: a flat line either fits exactly or the residual is real.
    fit.r_squared = ss_res <= 1e-24 ? 1.0 : 0.0;
  }
  return fit;
}

}  // namespace anncalc
