#pragma once

#include <cstdint>
#include <vector>

#include "anncalc/network.hpp"

namespace anncalc {

// Deterministic surrogate for a sup over R^d: a radial grid (origin plus
// +-r*e_i at radial_steps evenly spaced radii up to rho_max) united with
// random_points uniform draws from the ball of radius rho_max. The seed is
// recorded in reports so runs are reproducible; per-index streams derive
// from (seed, salt) so different grid points decorrelate.
struct SamplePlan {
  double rho_max = 10.0;
  int radial_steps = 8;
  int random_points = 512;
  std::uint64_t seed = 0;
};

// splitmix64 step; used to derive independent per-index seeds from the
// plan's base seed.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt);

// All sample points for one grid index (dimension dim). Platform-stable:
// fixed generator, fixed uniform conversion, no libc distribution calls.
std::vector<Vector> make_samples(const SamplePlan& plan, int dim,
                                 std::uint64_t salt);

}  // namespace anncalc
