#pragma once

#include <string>

#include "anncalc/certify.hpp"
#include "anncalc/ode.hpp"

namespace anncalc {

// Built-in problem families. All of them are exactly representable by
// rectifier networks, so network-construction error is zero and measured
// flow errors isolate the time-discretization analysis.

// f(x) = -x: contraction toward the origin. L = 1, f(0) = 0.
VectorField decay_field(int d);

// Planar block rotation: coordinate pairs (2k, 2k+1) turn at unit angular
// speed; an odd leftover coordinate stays fixed. For d = 1 there is no pair,
// so the field is identically zero with L = 0. Otherwise L = 1 (the
// generator is an isometry).
VectorField rotation_field(int d);

double relu_sum(const Vector& x);    // sum_i max{x_i, 0}
double first_coord(const Vector& x);

// Exact canonical networks.
Ann decay_f_net(int d);      // single affine stage, weights -I
Ann rotation_f_net(int d);   // single affine stage, the rotation generator
Ann relu_sum_g_net(int d);   // dims (d, d, 1); exact under the rectifier
Ann coord_g_net(int d);      // single affine row (1, 0, ..., 0)

// Builders over index {d}, exact at every accuracy. Field builders carry
// the unit growth envelope G = 1, H = 0. name in {"decay", "rotation"}.
NetworkFamilyBuilder canonical_f_builder(const std::string& name);

// name in {"relu-sum-g", "coord-g"}.
NetworkFamilyBuilder canonical_g_builder(const std::string& name);

// Target function families matching the builders above, indexed by {d}.
FunctionFamily canonical_f_family(const std::string& name);
FunctionFamily canonical_g_family(const std::string& name);

// Field + terminal pairing with declared constants (g_lipschitz = sqrt(d)
// for relu-sum-g, 1 for coord-g).
FlowProblem make_problem(const std::string& field_name,
                         const std::string& g_name, int d, double T);

// Conventional pairing: decay with relu-sum-g, rotation with coord-g.
std::string paired_terminal(const std::string& field_name);

}  // namespace anncalc
