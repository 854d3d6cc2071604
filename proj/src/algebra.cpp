#include "anncalc/algebra.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

namespace anncalc {

namespace {

void require_chain_dims(const std::vector<Ann>& fs) {
  for (std::size_t k = 0; k + 1 < fs.size(); ++k) {
    if (fs[k].input_dim() != fs[k + 1].output_dim()) {
      throw DimMismatchError(
          "chain factor " + std::to_string(k) + " expects input width " +
          std::to_string(fs[k].input_dim()) + " but factor " +
          std::to_string(k + 1) + " outputs " +
          std::to_string(fs[k + 1].output_dim()));
    }
  }
}

Layer fuse(const Layer& outer_first, const Layer& inner_last) {
  return Layer{outer_first.W * inner_last.W,
               outer_first.W * inner_last.b + outer_first.b};
}

}  // namespace

Ann compose(const Ann& outer, const Ann& inner) {
  if (outer.input_dim() != inner.output_dim()) {
    throw DimMismatchError("compose: outer expects input width " +
                           std::to_string(outer.input_dim()) +
                           " but inner outputs " +
                           std::to_string(inner.output_dim()));
  }
  std::vector<Layer> layers;
  layers.reserve(inner.depth() + outer.depth() - 1);
  for (int k = 0; k + 1 < inner.depth(); ++k) {
    layers.push_back(inner.layers()[k]);
  }
  layers.push_back(fuse(outer.layers().front(), inner.layers().back()));
  for (int k = 1; k < outer.depth(); ++k) {
    layers.push_back(outer.layers()[k]);
  }
  return Ann(std::move(layers));
}

ComposedChain compose_chain(const std::vector<Ann>& fs) {
  if (fs.empty()) {
    throw EmptyChainError("compose_chain needs at least one factor");
  }
  require_chain_dims(fs);

  // Left fold of compose, built incrementally. Folding in the next factor
  // only rewrites the accumulator's first stage and prepends layers, so we
  // keep the tail in reverse order and touch each layer exactly once.
  Layer head = fs[0].layers().front();
  std::vector<Layer> rev_tail;  // accumulator's layers[1..], last first
  for (int k = fs[0].depth() - 1; k >= 1; --k) {
    rev_tail.push_back(fs[0].layers()[k]);
  }
  for (std::size_t j = 1; j < fs.size(); ++j) {
    const Ann& g = fs[j];
    Layer merged = fuse(head, g.layers().back());
    if (g.depth() == 1) {
      head = std::move(merged);
    } else {
      rev_tail.push_back(std::move(merged));
      for (int k = g.depth() - 2; k >= 1; --k) {
        rev_tail.push_back(g.layers()[k]);
      }
      head = g.layers().front();
    }
  }
  std::vector<Layer> layers;
  layers.reserve(rev_tail.size() + 1);
  layers.push_back(std::move(head));
  for (auto it = rev_tail.rbegin(); it != rev_tail.rend(); ++it) {
    layers.push_back(std::move(*it));
  }

  CompositionReport report;
  report.exact_param_count = chain_param_identity(fs);
  report.upper_bound = chain_param_upper_bound(fs);
  report.dims = chain_dims(fs);
  return ComposedChain{Ann(std::move(layers)), std::move(report)};
}

std::vector<int> chain_dims(const std::vector<Ann>& fs) {
  if (fs.empty()) {
    throw EmptyChainError("chain_dims needs at least one factor");
  }
  require_chain_dims(fs);
  if (fs.size() == 1) {
    return fs[0].dims();
  }
  std::vector<int> out;
  const std::vector<int> inner = fs.back().dims();
  out.insert(out.end(), inner.begin(), inner.end() - 1);
  for (int j = static_cast<int>(fs.size()) - 2; j >= 1; --j) {
    const std::vector<int> mid = fs[j].dims();
    out.insert(out.end(), mid.begin() + 1, mid.end() - 1);
  }
  const std::vector<int> outer = fs.front().dims();
  out.insert(out.end(), outer.begin() + 1, outer.end());
  return out;
}

long long chain_param_identity(const std::vector<Ann>& fs) {
  if (fs.empty()) {
    throw EmptyChainError("chain_param_identity needs at least one factor");
  }
  require_chain_dims(fs);
  // Two-factor identity, applied left to right: fusing g's last stage into
  // the accumulator replaces the costs of the accumulator's first stage and
  // g's last stage with the merged stage's cost.
  long long total = fs[0].param_count();
  long long acc_w1 = fs[0].dims()[1];  // width after the first stage
  long long acc_in = fs[0].input_dim();
  for (std::size_t j = 1; j < fs.size(); ++j) {
    const std::vector<int> gd = fs[j].dims();
    const long long g_last = gd[gd.size() - 1];
    const long long g_prev = gd[gd.size() - 2];
    total += fs[j].param_count() + acc_w1 * (g_prev + 1) -
             acc_w1 * (acc_in + 1) - g_last * (g_prev + 1);
    if (fs[j].depth() >= 2) {
      acc_w1 = gd[1];
    }
    acc_in = gd[0];
  }
  return total;
}

long long chain_param_upper_bound(const std::vector<Ann>& fs) {
  if (fs.empty()) {
    throw EmptyChainError("chain_param_upper_bound needs at least one factor");
  }
  if (fs.size() == 1) {
    return fs[0].param_count();
  }
  long long bound = 0;
  for (std::size_t k = 0; k + 1 < fs.size(); ++k) {
    bound += fs[k].param_count() * fs[k + 1].param_count();
  }
  return 2 * bound;
}

Ann pad_depth(const Ann& f, int target_depth, const Activation& act) {
  if (target_depth < f.depth()) {
    throw TargetTooSmallError("pad_depth: target depth " +
                              std::to_string(target_depth) +
                              " < current depth " + std::to_string(f.depth()));
  }
  if (!act.admits_identity()) {
    throw UnsupportedActivationError(
        "pad_depth requires an activation with exact identity networks");
  }
  if (target_depth == f.depth()) {
    return f;
  }
  const Ann id = identity_net(f.output_dim(), act);
  Ann out = f;
  while (out.depth() < target_depth) {
    out = compose(id, out);
  }
  return out;
}

Ann parallelize(const Ann& f1, const Ann& f2, const Activation& act) {
  if (!act.admits_identity()) {
    throw UnsupportedActivationError(
        "parallelize requires an activation with exact identity networks");
  }
  const int depth = std::max(f1.depth(), f2.depth());
  const Ann a = pad_depth(f1, depth, act);
  const Ann b = pad_depth(f2, depth, act);
  std::vector<Layer> layers;
  layers.reserve(depth);
  for (int k = 0; k < depth; ++k) {
    const Layer& la = a.layers()[k];
    const Layer& lb = b.layers()[k];
    Matrix W = Matrix::Zero(la.W.rows() + lb.W.rows(),
                            la.W.cols() + lb.W.cols());
    W.topLeftCorner(la.W.rows(), la.W.cols()) = la.W;
    W.bottomRightCorner(lb.W.rows(), lb.W.cols()) = lb.W;
    Vector bias(la.b.size() + lb.b.size());
    bias << la.b, lb.b;
    layers.push_back(Layer{std::move(W), std::move(bias)});
  }
  return Ann(std::move(layers));
}

SumNetwork linear_combination(double lambda1, const Ann& f1, double lambda2,
                              const Ann& f2, const Activation& act) {
  if (f1.input_dim() != f2.input_dim() ||
      f1.output_dim() != f2.output_dim()) {
    throw DimMismatchError("linear_combination requires matching input and "
                           "output dims");
  }
  const int in = f1.input_dim();
  const int out = f1.output_dim();

  // Input duplicator x |-> (x, x) and weighted combiner (u, v) |->
  // lambda1*u + lambda2*v, both single affine stages that compose fuses into
  // the parallelized pair.
  Matrix dup = Matrix::Zero(2 * in, in);
  dup.topRows(in) = Matrix::Identity(in, in);
  dup.bottomRows(in) = Matrix::Identity(in, in);
  Matrix comb = Matrix::Zero(out, 2 * out);
  comb.leftCols(out) = lambda1 * Matrix::Identity(out, out);
  comb.rightCols(out) = lambda2 * Matrix::Identity(out, out);

  std::vector<Ann> chain;
  chain.push_back(affine_net(comb, Vector::Zero(out)));
  chain.push_back(parallelize(f1, f2, act));
  chain.push_back(affine_net(dup, Vector::Zero(2 * in)));
  Ann network = compose_chain(chain).network;

  const double c = kIdentityWidthFactor;
  SumConstants constants;
  constants.c_identity = c;
  constants.io_max = std::max(in, out);
  constants.declared_bound =
      static_cast<long long>(11.0 * std::max(1.0, c * c)) *
      static_cast<long long>(constants.io_max) * constants.io_max *
      (f1.param_count() + f2.param_count());
  return SumNetwork{std::move(network), constants};
}

Ann euler_step_net(const Ann& f, double delta, const Activation& act) {
  if (f.input_dim() != f.output_dim()) {
    throw NotEndomorphicError("euler_step_net requires input_dim == "
                              "output_dim, got " +
                              std::to_string(f.input_dim()) + " -> " +
                              std::to_string(f.output_dim()));
  }
  const Ann id = identity_net(f.input_dim(), act);
  return linear_combination(1.0, id, delta, f, act).network;
}

long long euler_step_param_bound(const Ann& f) {
  const double c = kIdentityWidthFactor;
  const long long dim = f.input_dim();
  return static_cast<long long>(44.0 * std::max(1.0, c * c * c)) * dim * dim *
         dim * dim * f.param_count();
}

}  // namespace anncalc
