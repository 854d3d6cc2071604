#include "anncalc/canonical.hpp"

#include <cmath>

namespace anncalc {

namespace {

Matrix rotation_generator(int d) {
  Matrix A = Matrix::Zero(d, d);
  for (int k = 0; k + 1 < d; k += 2) {
    A(k, k + 1) = -1.0;
    A(k + 1, k) = 1.0;
  }
  return A;
}

}  // namespace

VectorField decay_field(int d) {
  VectorField field;
  field.dim = d;
  field.eval = [](const Vector& x) { return Vector(-x); };
  field.lipschitz_L = 1.0;
  field.f0_norm = 0.0;
  return field;
}

VectorField rotation_field(int d) {
  VectorField field;
  field.dim = d;
  const Matrix A = rotation_generator(d);
  field.eval = [A](const Vector& x) { return Vector(A * x); };
  field.lipschitz_L = d >= 2 ? 1.0 : 0.0;
  field.f0_norm = 0.0;
  return field;
}

double relu_sum(const Vector& x) {
  double total = 0.0;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    total += std::max(x[i], 0.0);
  }
  return total;
}

double first_coord(const Vector& x) { return x[0]; }

Ann decay_f_net(int d) {
  return affine_net(-Matrix::Identity(d, d), Vector::Zero(d));
}

Ann rotation_f_net(int d) {
  return affine_net(rotation_generator(d), Vector::Zero(d));
}

Ann relu_sum_g_net(int d) {
  std::vector<Layer> layers;
  layers.push_back(Layer{Matrix::Identity(d, d), Vector::Zero(d)});
  layers.push_back(Layer{Matrix::Ones(1, d), Vector::Zero(1)});
  return Ann(std::move(layers));
}

Ann coord_g_net(int d) {
  Matrix W = Matrix::Zero(1, d);
  W(0, 0) = 1.0;
  return affine_net(W, Vector::Zero(1));
}

NetworkFamilyBuilder canonical_f_builder(const std::string& name) {
  NetworkFamilyBuilder builder;
  builder.activation = Activation::rectifier();
  if (name == "decay") {
    builder.build = [](const Index& index, double) {
      return decay_f_net(static_cast<int>(index.at(0)));
    };
  } else if (name == "rotation") {
    builder.build = [](const Index& index, double) {
      return rotation_f_net(static_cast<int>(index.at(0)));
    };
  } else {
    throw Error("unknown field family \"" + name + "\"");
  }
  GrowthEnvelope env;
  env.G = [](const Index&, double) { return 1.0; };
  env.H = [](const Index&, double) { return 0.0; };
  env.rho = 0.0;
  env.beta = {0.0};
  builder.envelope = std::move(env);
  return builder;
}

NetworkFamilyBuilder canonical_g_builder(const std::string& name) {
  NetworkFamilyBuilder builder;
  builder.activation = Activation::rectifier();
  if (name == "relu-sum-g") {
    builder.build = [](const Index& index, double) {
      return relu_sum_g_net(static_cast<int>(index.at(0)));
    };
  } else if (name == "coord-g") {
    builder.build = [](const Index& index, double) {
      return coord_g_net(static_cast<int>(index.at(0)));
    };
  } else {
    throw Error("unknown terminal family \"" + name + "\"");
  }
  return builder;
}

FunctionFamily canonical_f_family(const std::string& name) {
  FunctionFamily family;
  if (name == "decay") {
    family.eval = [](const Index&, const Vector& x) { return Vector(-x); };
  } else if (name == "rotation") {
    family.eval = [](const Index&, const Vector& x) {
      return Vector(rotation_generator(static_cast<int>(x.size())) * x);
    };
  } else {
    throw Error("unknown field family \"" + name + "\"");
  }
  return family;
}

FunctionFamily canonical_g_family(const std::string& name) {
  FunctionFamily family;
  if (name == "relu-sum-g") {
    family.eval = [](const Index&, const Vector& x) {
      Vector out(1);
      out[0] = relu_sum(x);
      return out;
    };
  } else if (name == "coord-g") {
    family.eval = [](const Index&, const Vector& x) {
      Vector out(1);
      out[0] = first_coord(x);
      return out;
    };
  } else {
    throw Error("unknown terminal family \"" + name + "\"");
  }
  return family;
}

FlowProblem make_problem(const std::string& field_name,
                         const std::string& g_name, int d, double T) {
  if (d < 1) {
    throw Error("problem dimension must be >= 1");
  }
  if (T < 0.0) {
    throw Error("problem horizon must be >= 0");
  }
  FlowProblem problem;
  if (field_name == "decay") {
    problem.field = decay_field(d);
  } else if (field_name == "rotation") {
    problem.field = rotation_field(d);
  } else {
    throw Error("unknown field family \"" + field_name + "\"");
  }
  if (g_name == "relu-sum-g") {
    problem.terminal = [](const Vector& x) { return relu_sum(x); };
    problem.g_lipschitz = std::sqrt(static_cast<double>(d));
  } else if (g_name == "coord-g") {
    problem.terminal = [](const Vector& x) { return first_coord(x); };
    problem.g_lipschitz = 1.0;
  } else {
    throw Error("unknown terminal family \"" + g_name + "\"");
  }
  problem.T = T;
  return problem;
}

std::string paired_terminal(const std::string& field_name) {
  if (field_name == "decay") {
    return "relu-sum-g";
  }
  if (field_name == "rotation") {
    return "coord-g";
  }
  throw Error("unknown field family \"" + field_name + "\"");
}

}  // namespace anncalc
