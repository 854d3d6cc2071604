#include "anncalc/sampling.hpp"

#include <cmath>
#include <random>

namespace anncalc {

namespace {

// Uniform in (0, 1]: the +1 keeps log() finite in the Gaussian transform.
double next_uniform(std::mt19937_64& gen) {
  return static_cast<double>((gen() >> 11) + 1) * 0x1.0p-53;
}

// Box-Muller, cosine branch only; one Gaussian per two uniforms keeps the
// draw sequence independent of how callers consume values.
double next_gaussian(std::mt19937_64& gen) {
  const double u1 = next_uniform(gen);
  const double u2 = next_uniform(gen);
  return std::sqrt(-2.0 * std::log(u1)) *
         std::cos(2.0 * 3.141592653589793238462643383279502884 * u2);
}

}  // namespace

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (salt + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::vector<Vector> make_samples(const SamplePlan& plan, int dim,
                                 std::uint64_t salt) {
  if (dim < 1) {
    throw DimMismatchError("samples need dimension >= 1");
  }
  std::vector<Vector> points;
  points.reserve(1 + 2 * dim * plan.radial_steps + plan.random_points);

  points.push_back(Vector::Zero(dim));
  for (int step = 1; step <= plan.radial_steps; ++step) {
    const double r = plan.rho_max * step / plan.radial_steps;
    for (int i = 0; i < dim; ++i) {
      Vector p = Vector::Zero(dim);
      p[i] = r;
      points.push_back(p);
      p[i] = -r;
      points.push_back(std::move(p));
    }
  }

  std::mt19937_64 gen(mix_seed(plan.seed, salt));
  for (int k = 0; k < plan.random_points; ++k) {
    Vector dir(dim);
    for (int i = 0; i < dim; ++i) {
      dir[i] = next_gaussian(gen);
    }
    const double norm = dir.norm();
    const double radius =
        plan.rho_max * std::pow(next_uniform(gen), 1.0 / dim);
    if (norm > 0.0) {
      points.push_back((radius / norm) * dir);
    } else {
      points.push_back(Vector::Zero(dim));
    }
  }
  return points;
}

}  // namespace anncalc
