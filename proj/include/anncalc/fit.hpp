#pragma once

#include <vector>

#include "anncalc/errors.hpp"

namespace anncalc {

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
  int n = 0;
};

// Ordinary least squares y ~ slope*x + intercept. Throws DegenerateFitError
// for fewer than two points or zero variance in x. A perfect fit reports
// r_squared = 1 even when the y values are all equal.
LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace anncalc
