#pragma once

#include <vector>

#include "anncalc/network.hpp"

namespace anncalc {

// Identity-emulation width factor: our identity networks use hidden width
// 2d, so constructions that splice identities in carry c = 2 in their
// declared parameter ceilings.
inline constexpr double kIdentityWidthFactor = 2.0;

// Parameter accounting attached to a composed chain. exact_param_count comes
// from iterating the exact two-factor identity (remove the fused stages' old
// costs, add the merged stage's cost); upper_bound is the coarse pairwise
// product bound 2*sum_k P(f_k)P(f_{k+1}), reported as the exact count for a
// single-factor chain.
struct CompositionReport {
  long long exact_param_count = 0;
  long long upper_bound = 0;
  std::vector<int> dims;
};

struct ComposedChain {
  Ann network;
  CompositionReport report;
};

// Composition outer . inner: inner's last affine stage is fused with outer's
// first (W_out1 * W_inL, W_out1 * b_inL + b_out1), so
// depth = depth(outer) + depth(inner) - 1 and the realization is the exact
// function composition under every activation. Throws DimMismatchError when
// input_dim(outer) != output_dim(inner).
Ann compose(const Ann& outer, const Ann& inner);

// Composes fs[0] . fs[1] . ... . fs[n-1] (fs[0] outermost, i.e. applied
// last). Bitwise identical to left-folding compose, but built with a single
// pass so long chains cost O(total layers) instead of O(n^2) copies.
// Throws EmptyChainError / DimMismatchError.
ComposedChain compose_chain(const std::vector<Ann>& fs);

// Architecture of the composed chain, computable without composing: the
// innermost factor contributes all widths but its last, each middle factor
// its strictly interior widths, the outermost all widths but its first.
std::vector<int> chain_dims(const std::vector<Ann>& fs);

// Exact parameter count of the composed chain via the iterated two-factor
// identity; equals param_count(compose_chain(fs).network).
long long chain_param_identity(const std::vector<Ann>& fs);

// 2*sum_{k} P(f_k)P(f_{k+1}) for n >= 2; the exact count for n = 1.
long long chain_param_upper_bound(const std::vector<Ann>& fs);

// Raises depth to target_depth by composing identity networks (hidden width
// 2*output_dim(f)) after f; realization unchanged. Throws
// TargetTooSmallError / UnsupportedActivationError.
Ann pad_depth(const Ann& f, int target_depth, const Activation& act);

// Block-diagonal stacking after padding the shallower operand to common
// depth: realize(p, (x,y)) = (realize(f1,x), realize(f2,y)).
Ann parallelize(const Ann& f1, const Ann& f2, const Activation& act);

// Constants attached to a linear-combination network; declared_bound is the
// parameter ceiling 11*max{1,c^2}*max{in,out}^2*(P1+P2) with c = 2.
struct SumConstants {
  double c_identity = kIdentityWidthFactor;
  int io_max = 0;
  long long declared_bound = 0;
};

struct SumNetwork {
  Ann network;
  SumConstants constants;
};

// Network realizing lambda1*realize(f1) + lambda2*realize(f2): an input
// duplicator, the parallelization of f1 and f2, and a weighted combiner,
// with the duplicator and combiner fused into their neighbors by compose.
// Requires matching input dims and matching output dims.
SumNetwork linear_combination(double lambda1, const Ann& f1, double lambda2,
                              const Ann& f2, const Activation& act);

// Network realizing x + delta*realize(f)(x) for endomorphic f (the explicit
// Euler update with step delta). Throws NotEndomorphicError when
// input_dim(f) != output_dim(f).
Ann euler_step_net(const Ann& f, double delta, const Activation& act);

// Declared parameter ceiling 44*max{1,c^3}*input_dim(f)^4*P(f) for the Euler
// step construction, c = 2.
long long euler_step_param_bound(const Ann& f);

}  // namespace anncalc
