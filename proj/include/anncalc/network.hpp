#pragma once

#include <Eigen/Dense>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "anncalc/errors.hpp"

namespace anncalc {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// One affine stage x |-> W x + b. rows(W) is the stage's output width,
// cols(W) its input width; length(b) == rows(W).
struct Layer {
  Matrix W;
  Vector b;
};

// Componentwise activation applied between affine stages (never after the
// last one). Rectifier and leaky rectifier admit exact identity networks of
// width 2d; an opaque scalar function can be evaluated but not used by the
// constructions that need identity emulation.
class Activation {
 public:
  enum class Kind { Rectifier, LeakyRectifier, Opaque };

  static Activation rectifier();
  // slope must lie strictly between 0 and 1.
  static Activation leaky_rectifier(double slope);
  static Activation opaque(std::function<double(double)> fn);

  Kind kind() const { return kind_; }
  double slope() const { return slope_; }
  // True when an exact identity network exists for this activation.
  bool admits_identity() const { return kind_ != Kind::Opaque; }

  double operator()(double t) const;
  void apply_in_place(Matrix& values) const;

  // Short text tag used by the file format ("relu", "leaky:<slope>"); empty
  // for opaque activations.
  std::string hint() const;
  static std::optional<Activation> from_hint(const std::string& hint);

 private:
  Activation(Kind kind, double slope, std::function<double(double)> fn)
      : kind_(kind), slope_(slope), fn_(std::move(fn)) {}

  Kind kind_;
  double slope_;
  std::function<double(double)> fn_;
};

// A feedforward network: a nonempty list of affine layers with chaining
// shapes. Immutable after construction; all operations on it are pure.
class Ann {
 public:
  // Validates shapes; throws EmptyNetworkError, ZeroWidthLayerError, or
  // ShapeMismatchError.
  explicit Ann(std::vector<Layer> layers);

  const std::vector<Layer>& layers() const { return layers_; }
  int depth() const { return static_cast<int>(layers_.size()); }
  int input_dim() const { return static_cast<int>(layers_.front().W.cols()); }
  int output_dim() const { return static_cast<int>(layers_.back().W.rows()); }
  int hidden_count() const { return depth() - 1; }
  // Width vector (l_0, ..., l_L) recovered from the layer shapes.
  std::vector<int> dims() const;
  // Sum over layers of rows*(cols+1); always >= 2.
  long long param_count() const;
  bool all_finite() const;

 private:
  std::vector<Layer> layers_;
};

struct Architecture {
  int depth;
  int input_dim;
  int output_dim;
  int hidden_count;
  std::vector<int> dims;
};

Ann make_ann(std::vector<Layer> layers);
Architecture architecture(const Ann& ann);
long long param_count(const Ann& ann);

// Forward evaluation: alternate affine stages and the activation, with no
// activation after the final stage. Throws DimMismatchError when the input
// length differs from the network's input width.
Vector realize(const Ann& ann, const Activation& act, const Vector& x);

// Batch variant: each column of `points` is one input; returns one output
// column per input. Same arithmetic per column as realize up to the usual
// reassociation inside matrix products.
Matrix realize_batch(const Ann& ann, const Activation& act,
                     const Matrix& points);

// Width-2d network whose realization is exactly the identity on R^d:
// x = a(x) - a(-x) for the rectifier, rescaled by 1/(1+slope) for the leaky
// rectifier (folded into the output weights). Throws
// UnsupportedActivationError for opaque activations.
Ann identity_net(int d, const Activation& act);

// Single-layer network realizing x |-> W x + b under every activation.
Ann affine_net(const Matrix& W, const Vector& b);

// Exact (bitwise) comparison of shapes and entries.
bool structurally_equal(const Ann& a, const Ann& b);

}  // namespace anncalc
