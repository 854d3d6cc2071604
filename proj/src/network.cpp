#include "anncalc/network.hpp"

#include <cmath>
#include <cstring>
#include <utility>

#include "anncalc/format.hpp"

namespace anncalc {

Activation Activation::rectifier() {
  return Activation(Kind::Rectifier, 0.0, nullptr);
}

Activation Activation::leaky_rectifier(double slope) {
  if (!(slope > 0.0) || !(slope < 1.0)) {
    throw Error("leaky rectifier slope must lie strictly between 0 and 1");
  }
  return Activation(Kind::LeakyRectifier, slope, nullptr);
}

Activation Activation::opaque(std::function<double(double)> fn) {
  if (!fn) {
    throw Error("opaque activation requires a callable scalar function");
  }
  return Activation(Kind::Opaque, 0.0, std::move(fn));
}

double Activation::operator()(double t) const {
  switch (kind_) {
    case Kind::Rectifier:
      return t > 0.0 ? t : 0.0;
    case Kind::LeakyRectifier:
      return t >= 0.0 ? t : slope_ * t;
    case Kind::Opaque:
      return fn_(t);
  }
  return t;  // unreachable
}

void Activation::apply_in_place(Matrix& values) const {
  switch (kind_) {
    case Kind::Rectifier:
      values = values.cwiseMax(0.0);
      return;
    case Kind::LeakyRectifier: {
      const double a = slope_;
      values = values.unaryExpr([a](double t) { return t >= 0.0 ? t : a * t; });
      return;
    }
    case Kind::Opaque: {
      const auto& f = fn_;
      values = values.unaryExpr([&f](double t) { return f(t); });
      return;
    }
  }
}

std::string Activation::hint() const {
  switch (kind_) {
    case Kind::Rectifier:
      return "relu";
    case Kind::LeakyRectifier:
      return "leaky:" + format_double(slope_);
    case Kind::Opaque:
      return "";
  }
  return "";
}

std::optional<Activation> Activation::from_hint(const std::string& hint) {
  if (hint == "relu") {
    return rectifier();
  }
  const std::string prefix = "leaky:";
  if (hint.rfind(prefix, 0) == 0) {
    try {
      const double slope = std::stod(hint.substr(prefix.size()));
      return leaky_rectifier(slope);
    } catch (const std::exception&) {
      return std::nullopt;
    }
  }
  return std::nullopt;
}

Ann::Ann(std::vector<Layer> layers) : layers_(std::move(layers)) {
  if (layers_.empty()) {
    throw EmptyNetworkError("a network needs at least one layer");
  }
  for (std::size_t k = 0; k < layers_.size(); ++k) {
    const Layer& l = layers_[k];
    if (l.W.rows() < 1 || l.W.cols() < 1) {
      throw ZeroWidthLayerError("layer " + std::to_string(k) +
                                " has a zero-width weight matrix");
    }
    if (l.b.size() != l.W.rows()) {
      throw ShapeMismatchError(
          "layer " + std::to_string(k) + " bias length " +
          std::to_string(l.b.size()) + " != weight rows " +
          std::to_string(l.W.rows()));
    }
    if (k > 0 && layers_[k].W.cols() != layers_[k - 1].W.rows()) {
      throw ShapeMismatchError(
          "layer " + std::to_string(k) + " expects input width " +
          std::to_string(layers_[k].W.cols()) + " but previous layer outputs " +
          std::to_string(layers_[k - 1].W.rows()));
    }
  }
}

std::vector<int> Ann::dims() const {
  std::vector<int> d;
  d.reserve(layers_.size() + 1);
  d.push_back(input_dim());
  for (const Layer& l : layers_) {
    d.push_back(static_cast<int>(l.W.rows()));
  }
  return d;
}

long long Ann::param_count() const {
  long long total = 0;
  for (const Layer& l : layers_) {
    total += static_cast<long long>(l.W.rows()) * (l.W.cols() + 1);
  }
  return total;
}

bool Ann::all_finite() const {
  for (const Layer& l : layers_) {
    if (!l.W.allFinite() || !l.b.allFinite()) {
      return false;
    }
  }
  return true;
}

Ann make_ann(std::vector<Layer> layers) { return Ann(std::move(layers)); }

Architecture architecture(const Ann& ann) {
  return Architecture{ann.depth(), ann.input_dim(), ann.output_dim(),
                      ann.hidden_count(), ann.dims()};
}

long long param_count(const Ann& ann) { return ann.param_count(); }

Vector realize(const Ann& ann, const Activation& act, const Vector& x) {
  if (x.size() != ann.input_dim()) {
    throw DimMismatchError("input length " + std::to_string(x.size()) +
                           " != network input width " +
                           std::to_string(ann.input_dim()));
  }
  Vector v = x;
  const auto& layers = ann.layers();
  for (std::size_t k = 0; k < layers.size(); ++k) {
    v = layers[k].W * v + layers[k].b;
    if (k + 1 < layers.size()) {
      for (Eigen::Index i = 0; i < v.size(); ++i) {
        v[i] = act(v[i]);
      }
    }
  }
  return v;
}

Matrix realize_batch(const Ann& ann, const Activation& act,
                     const Matrix& points) {
  if (points.rows() != ann.input_dim()) {
    throw DimMismatchError("input rows " + std::to_string(points.rows()) +
                           " != network input width " +
                           std::to_string(ann.input_dim()));
  }
  Matrix v = points;
  const auto& layers = ann.layers();
  for (std::size_t k = 0; k < layers.size(); ++k) {
    Matrix next = layers[k].W * v;
    next.colwise() += layers[k].b;
    v = std::move(next);
    if (k + 1 < layers.size()) {
      act.apply_in_place(v);
    }
  }
  return v;
}

Ann identity_net(int d, const Activation& act) {
  if (!act.admits_identity()) {
    throw UnsupportedActivationError(
        "opaque activations have no exact identity network");
  }
  if (d < 1) {
    throw ZeroWidthLayerError("identity network needs dimension >= 1");
  }
  // Hidden channels carry (x, -x); the output recombines a(x) - a(-x), which
  // equals x for the rectifier and (1+slope)*x for the leaky rectifier, hence
  // the 1/(1+slope) output scale.
  const double scale =
      act.kind() == Activation::Kind::LeakyRectifier ? 1.0 / (1.0 + act.slope())
                                                     : 1.0;
  Matrix w1 = Matrix::Zero(2 * d, d);
  w1.topRows(d) = Matrix::Identity(d, d);
  w1.bottomRows(d) = -Matrix::Identity(d, d);
  Matrix w2 = Matrix::Zero(d, 2 * d);
  w2.leftCols(d) = scale * Matrix::Identity(d, d);
  w2.rightCols(d) = -scale * Matrix::Identity(d, d);
  std::vector<Layer> layers;
  layers.push_back(Layer{std::move(w1), Vector::Zero(2 * d)});
  layers.push_back(Layer{std::move(w2), Vector::Zero(d)});
  return Ann(std::move(layers));
}

Ann affine_net(const Matrix& W, const Vector& b) {
  if (W.rows() != b.size()) {
    throw ShapeMismatchError("affine layer: bias length " +
                             std::to_string(b.size()) + " != weight rows " +
                             std::to_string(W.rows()));
  }
  std::vector<Layer> layers;
  layers.push_back(Layer{W, b});
  return Ann(std::move(layers));
}

bool structurally_equal(const Ann& a, const Ann& b) {
  if (a.depth() != b.depth()) {
    return false;
  }
  for (int k = 0; k < a.depth(); ++k) {
    const Layer& la = a.layers()[k];
    const Layer& lb = b.layers()[k];
    if (la.W.rows() != lb.W.rows() || la.W.cols() != lb.W.cols()) {
      return false;
    }
    if (std::memcmp(la.W.data(), lb.W.data(),
                    sizeof(double) * la.W.size()) != 0) {
      return false;
    }
    if (std::memcmp(la.b.data(), lb.b.data(),
                    sizeof(double) * la.b.size()) != 0) {
      return false;
    }
  }
  return true;
}

}  // namespace anncalc
