#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "anncalc/algebra.hpp"
#include "anncalc/network.hpp"

using namespace anncalc;

namespace {

Ann net_with_dims(std::mt19937_64& gen, const std::vector<int>& dims) {
  std::uniform_real_distribution<double> coef(-0.5, 0.5);
  std::vector<Layer> layers;
  for (std::size_t k = 0; k + 1 < dims.size(); ++k) {
    Matrix W(dims[k + 1], dims[k]);
    for (Eigen::Index r = 0; r < W.rows(); ++r) {
      for (Eigen::Index c = 0; c < W.cols(); ++c) {
        W(r, c) = coef(gen);
      }
    }
    Vector b(dims[k + 1]);
    for (Eigen::Index r = 0; r < b.size(); ++r) {
      b[r] = coef(gen);
    }
    layers.push_back(Layer{std::move(W), std::move(b)});
  }
  return Ann(std::move(layers));
}

std::vector<int> random_dims(std::mt19937_64& gen, int in, int out,
                             int depth) {
  std::uniform_int_distribution<int> width(1, 5);
  std::vector<int> dims{in};
  for (int k = 1; k < depth; ++k) {
    dims.push_back(width(gen));
  }
  dims.push_back(out);
  return dims;
}

Vector random_point(std::mt19937_64& gen, int dim) {
  std::uniform_real_distribution<double> coord(-1.0, 1.0);
  Vector x(dim);
  for (int i = 0; i < dim; ++i) {
    x[i] = coord(gen);
  }
  return x;
}

const Activation kRelu = Activation::rectifier();

}  // namespace

TEST_CASE("composition: frozen width/parameter bookkeeping") {
  std::mt19937_64 gen(101);
  const Ann f = net_with_dims(gen, {4, 5, 3});  // R^4 -> R^3
  const Ann g = net_with_dims(gen, {2, 6, 4});  // R^2 -> R^4
  const Ann fg = compose(f, g);
  CHECK(fg.dims() == std::vector<int>{2, 6, 5, 3});
  CHECK(fg.depth() == f.depth() + g.depth() - 1);
  // exact count by hand: 43 + 46 + 5*7 - 5*5 - 4*7
  CHECK(f.param_count() == 43);
  CHECK(g.param_count() == 46);
  CHECK(fg.param_count() == 71);
  CHECK(chain_param_identity({f, g}) == 71);
}

TEST_CASE("composition realizes function composition") {
  std::mt19937_64 gen(102);
  for (int trial = 0; trial < 30; ++trial) {
    std::uniform_int_distribution<int> dim(1, 5), depth(1, 4);
    const int a = dim(gen), b = dim(gen), c = dim(gen);
    const Ann g = net_with_dims(gen, random_dims(gen, a, b, depth(gen)));
    const Ann f = net_with_dims(gen, random_dims(gen, b, c, depth(gen)));
    const Ann fg = compose(f, g);
    CHECK(fg.depth() == f.depth() + g.depth() - 1);
    CHECK(fg.input_dim() == a);
    CHECK(fg.output_dim() == c);
    for (int p = 0; p < 5; ++p) {
      const Vector x = random_point(gen, a);
      const Vector direct = realize(fg, kRelu, x);
      const Vector staged = realize(f, kRelu, realize(g, kRelu, x));
      CHECK((direct - staged).cwiseAbs().maxCoeff() <= 1e-10);
    }
  }
}

TEST_CASE("composition rejects non-chaining shapes") {
  std::mt19937_64 gen(103);
  const Ann f = net_with_dims(gen, {3, 2});
  const Ann g = net_with_dims(gen, {2, 4});
  CHECK_THROWS_AS(compose(f, g), DimMismatchError);
}

TEST_CASE("two affine stages fuse into their exact product") {
  std::mt19937_64 gen(104);
  Matrix Wf(2, 3), Wg(3, 2);
  Wf << 1, 2, 3, 4, 5, 6;
  Wg << 1, -1, 0, 2, -3, 1;
  Vector bf(2), bg(3);
  bf << 1, -1;
  bg << 0.5, 0, -0.5;
  const Ann fg = compose(affine_net(Wf, bf), affine_net(Wg, bg));
  CHECK(fg.depth() == 1);
  CHECK((fg.layers()[0].W - Wf * Wg).norm() == 0.0);
  CHECK((fg.layers()[0].b - (Wf * bg + bf)).norm() == 0.0);
}

TEST_CASE("chain composition matches the iterated fold bitwise") {
  std::mt19937_64 gen(105);
  std::uniform_int_distribution<int> len(2, 6), dim(1, 5), depth(1, 4);
  for (int trial = 0; trial < 40; ++trial) {
    const int n = len(gen);
    std::vector<int> widths(n + 1);
    for (int& w : widths) {
      w = dim(gen);
    }
    // fs[0] outermost: fs[j] maps widths[j+1] -> widths[j]
    std::vector<Ann> fs;
    for (int j = 0; j < n; ++j) {
      fs.push_back(net_with_dims(
          gen, random_dims(gen, widths[j + 1], widths[j], depth(gen))));
    }
    const ComposedChain chain = compose_chain(fs);

    Ann folded = fs[0];
    for (int j = 1; j < n; ++j) {
      folded = compose(folded, fs[j]);
    }
    CHECK(structurally_equal(chain.network, folded));
    CHECK(chain.network.param_count() == chain.report.exact_param_count);
    CHECK(chain.report.exact_param_count == chain_param_identity(fs));
    CHECK(chain.network.dims() == chain.report.dims);
    CHECK(chain.report.dims == chain_dims(fs));
    CHECK(chain.report.exact_param_count <= chain.report.upper_bound);
    CHECK(chain.report.upper_bound == chain_param_upper_bound(fs));
  }
}

TEST_CASE("chain of single-stage factors: frozen counts") {
  std::mt19937_64 gen(106);
  // outermost (2->3), middle (2->2), innermost (4->2); all single-stage
  const Ann A = net_with_dims(gen, {2, 3});
  const Ann B = net_with_dims(gen, {2, 2});
  const Ann C = net_with_dims(gen, {4, 2});
  const std::vector<Ann> fs{A, B, C};
  const ComposedChain chain = compose_chain(fs);
  CHECK(chain.network.depth() == 1);
  CHECK(chain.network.dims() == std::vector<int>{4, 3});
  CHECK(chain.network.param_count() == 15);
  CHECK(chain_param_identity(fs) == 15);
  // pairwise product bound: 2*(9*6 + 6*10)
  CHECK(chain_param_upper_bound(fs) == 228);
}

TEST_CASE("single-factor chain is the factor itself") {
  std::mt19937_64 gen(107);
  const Ann f = net_with_dims(gen, {3, 4, 2});
  const ComposedChain chain = compose_chain({f});
  CHECK(structurally_equal(chain.network, f));
  CHECK(chain.report.exact_param_count == f.param_count());
  CHECK(chain.report.upper_bound == f.param_count());
  CHECK(chain.report.dims == f.dims());
  CHECK_THROWS_AS(compose_chain({}), EmptyChainError);
}

TEST_CASE("chain realization composes the factor realizations") {
  std::mt19937_64 gen(108);
  std::uniform_int_distribution<int> dim(1, 4), depth(1, 3);
  for (int trial = 0; trial < 15; ++trial) {
    const int a = dim(gen), b = dim(gen), c = dim(gen), d = dim(gen);
    const Ann h = net_with_dims(gen, random_dims(gen, a, b, depth(gen)));
    const Ann g = net_with_dims(gen, random_dims(gen, b, c, depth(gen)));
    const Ann f = net_with_dims(gen, random_dims(gen, c, d, depth(gen)));
    const Ann chain = compose_chain({f, g, h}).network;
    for (int p = 0; p < 4; ++p) {
      const Vector x = random_point(gen, a);
      const Vector staged =
          realize(f, kRelu, realize(g, kRelu, realize(h, kRelu, x)));
      CHECK((realize(chain, kRelu, x) - staged).cwiseAbs().maxCoeff() <=
            1e-10);
    }
  }
}

TEST_CASE("composition is associative") {
  std::mt19937_64 gen(109);
  std::uniform_int_distribution<int> dim(1, 4), depth(2, 4);
  // with a multi-stage middle factor both associations produce the same
  // layer list, bit for bit
  for (int trial = 0; trial < 20; ++trial) {
    const int a = dim(gen), b = dim(gen), c = dim(gen), d = dim(gen);
    const Ann h = net_with_dims(gen, random_dims(gen, a, b, depth(gen)));
    const Ann g = net_with_dims(gen, random_dims(gen, b, c, depth(gen)));
    const Ann f = net_with_dims(gen, random_dims(gen, c, d, depth(gen)));
    CHECK(structurally_equal(compose(compose(f, g), h),
                             compose(f, compose(g, h))));
  }
  // a single-stage middle factor reassociates a matrix product, so equality
  // holds at realization level (to rounding), not bitwise
  for (int trial = 0; trial < 20; ++trial) {
    const int a = dim(gen), b = dim(gen), c = dim(gen), d = dim(gen);
    const Ann h = net_with_dims(gen, random_dims(gen, a, b, depth(gen)));
    const Ann g = net_with_dims(gen, {b, c});
    const Ann f = net_with_dims(gen, random_dims(gen, c, d, depth(gen)));
    const Ann left = compose(compose(f, g), h);
    const Ann right = compose(f, compose(g, h));
    for (int p = 0; p < 4; ++p) {
      const Vector x = random_point(gen, a);
      CHECK((realize(left, kRelu, x) - realize(right, kRelu, x))
                .cwiseAbs()
                .maxCoeff() <= 1e-12);
    }
  }
}

TEST_CASE("depth padding preserves the realization exactly") {
  std::mt19937_64 gen(110);
  const Ann f = net_with_dims(gen, {3, 4, 2});
  const Ann padded = pad_depth(f, 4, kRelu);
  CHECK(padded.depth() == 4);
  CHECK(padded.input_dim() == 3);
  CHECK(padded.output_dim() == 2);
  for (int p = 0; p < 20; ++p) {
    const Vector x = random_point(gen, 3);
    // identity stages only copy and negate, so padding is bitwise exact
    CHECK((realize(padded, kRelu, x) - realize(f, kRelu, x)).norm() == 0.0);
  }
  CHECK(structurally_equal(pad_depth(f, 2, kRelu), f));
  CHECK_THROWS_AS(pad_depth(f, 1, kRelu), TargetTooSmallError);
  const Activation opaque = Activation::opaque([](double t) { return t; });
  CHECK_THROWS_AS(pad_depth(f, 4, opaque), UnsupportedActivationError);
}

TEST_CASE("parallelization stacks realizations") {
  std::mt19937_64 gen(111);
  std::uniform_int_distribution<int> dim(1, 4), depth(1, 3);
  for (int trial = 0; trial < 15; ++trial) {
    const int a1 = dim(gen), b1 = dim(gen);
    const int a2 = dim(gen), b2 = dim(gen);
    const Ann f1 = net_with_dims(gen, random_dims(gen, a1, b1, depth(gen)));
    const Ann f2 = net_with_dims(gen, random_dims(gen, a2, b2, depth(gen)));
    const Ann p = parallelize(f1, f2, kRelu);
    CHECK(p.input_dim() == a1 + a2);
    CHECK(p.output_dim() == b1 + b2);
    CHECK(p.depth() == std::max(f1.depth(), f2.depth()));
    const Vector x1 = random_point(gen, a1);
    const Vector x2 = random_point(gen, a2);
    Vector joint(a1 + a2);
    joint << x1, x2;
    Vector expected(b1 + b2);
    expected << realize(f1, kRelu, x1), realize(f2, kRelu, x2);
    CHECK((realize(p, kRelu, joint) - expected).norm() == 0.0);
  }
}

TEST_CASE("linear combination: realization and frozen ceiling") {
  std::mt19937_64 gen(112);
  const Ann f1 = net_with_dims(gen, {3, 3, 3});        // 24 parameters
  const Ann f2 = net_with_dims(gen, {3, 3, 3, 3});     // 36 parameters
  CHECK(f1.param_count() == 24);
  CHECK(f2.param_count() == 36);
  const SumNetwork sum = linear_combination(2.0, f1, -0.5, f2, kRelu);
  CHECK(sum.network.input_dim() == 3);
  CHECK(sum.network.output_dim() == 3);
  // ceiling 11 * max{1, c^2} * max{in,out}^2 * (P1+P2) with c = 2
  CHECK(sum.constants.io_max == 3);
  CHECK(sum.constants.declared_bound == 23760);
  CHECK(sum.network.param_count() <= sum.constants.declared_bound);
  for (int p = 0; p < 20; ++p) {
    const Vector x = random_point(gen, 3);
    const Vector expected =
        2.0 * realize(f1, kRelu, x) - 0.5 * realize(f2, kRelu, x);
    CHECK((realize(sum.network, kRelu, x) - expected).cwiseAbs().maxCoeff() <=
          1e-12);
  }

  const Ann wrong = net_with_dims(gen, {2, 3});
  CHECK_THROWS_AS(linear_combination(1.0, f1, 1.0, wrong, kRelu),
                  DimMismatchError);
}

TEST_CASE("linear combination under the leaky rectifier") {
  std::mt19937_64 gen(113);
  const Activation leaky = Activation::leaky_rectifier(0.3);
  const Ann f1 = net_with_dims(gen, {2, 4, 2});
  const Ann f2 = net_with_dims(gen, {2, 2});
  const SumNetwork sum = linear_combination(1.5, f1, 1.0, f2, leaky);
  for (int p = 0; p < 20; ++p) {
    const Vector x = random_point(gen, 2);
    const Vector expected =
        1.5 * realize(f1, leaky, x) + realize(f2, leaky, x);
    CHECK((realize(sum.network, leaky, x) - expected).cwiseAbs().maxCoeff() <=
          1e-12);
  }
}

TEST_CASE("explicit Euler update network") {
  std::mt19937_64 gen(114);
  const Ann f = net_with_dims(gen, {2, 2, 2});
  CHECK(f.param_count() == 12);
  // ceiling 44 * max{1, c^3} * in^4 * P with c = 2: 352 * 16 * 12
  CHECK(euler_step_param_bound(f) == 67584);
  const Ann step = euler_step_net(f, 0.125, kRelu);
  CHECK(step.input_dim() == 2);
  CHECK(step.output_dim() == 2);
  CHECK(step.param_count() <= euler_step_param_bound(f));
  for (int p = 0; p < 20; ++p) {
    const Vector x = random_point(gen, 2);
    const Vector expected = x + 0.125 * realize(f, kRelu, x);
    CHECK((realize(step, kRelu, x) - expected).cwiseAbs().maxCoeff() <=
          1e-12);
  }

  const Ann not_endo = net_with_dims(gen, {2, 3});
  CHECK_THROWS_AS(euler_step_net(not_endo, 0.1, kRelu), NotEndomorphicError);
}

TEST_CASE("declared ceilings hold across random inputs") {
  std::mt19937_64 gen(115);
  std::uniform_int_distribution<int> dim(1, 5), depth(1, 4);
  for (int trial = 0; trial < 30; ++trial) {
    const int in = dim(gen), out = dim(gen), d = dim(gen);
    const Ann f1 = net_with_dims(gen, random_dims(gen, in, out, depth(gen)));
    const Ann f2 = net_with_dims(gen, random_dims(gen, in, out, depth(gen)));
    const SumNetwork sum = linear_combination(3.0, f1, -2.0, f2, kRelu);
    CHECK(sum.network.param_count() <= sum.constants.declared_bound);

    const Ann endo = net_with_dims(gen, random_dims(gen, d, d, depth(gen)));
    const Ann step = euler_step_net(endo, 0.01, kRelu);
    CHECK(step.param_count() <= euler_step_param_bound(endo));
  }
}
