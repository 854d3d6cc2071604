#include "anncalc/certify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include <json.hpp>

#include "anncalc/algebra.hpp"
#include "anncalc/parallel.hpp"

namespace anncalc {

namespace {

using Json = nlohmann::ordered_json;

constexpr double kInf = std::numeric_limits<double>::infinity();

std::uint64_t index_salt(const Index& index) {
  std::uint64_t salt = 0x5151bb5a9ae1f21bULL;
  for (long long entry : index) {
    salt = mix_seed(salt, static_cast<std::uint64_t>(entry));
  }
  return salt;
}

Json json_double(double v) {
  if (std::isnan(v)) {
    return Json("NaN");
  }
  if (std::isinf(v)) {
    return Json(v > 0 ? "Infinity" : "-Infinity");
  }
  return Json(v);
}

void validate_dims(const std::vector<long long>& dims, int dim_count) {
  if (static_cast<int>(dims.size()) != dim_count) {
    throw Error("dimension map returned " + std::to_string(dims.size()) +
                " entries, grid declares " + std::to_string(dim_count));
  }
  for (long long d : dims) {
    if (d < 1) {
      throw Error("dimension map entries must be >= 1");
    }
  }
}

}  // namespace

double budget_value(const GrowthBudget& budget, double eps,
                    const std::vector<long long>& dims) {
  double value = budget.K * std::pow(eps, -budget.r0);
  for (std::size_t l = 0; l < dims.size(); ++l) {
    const double exponent = l < budget.r.size() ? budget.r[l] : 0.0;
    value *= std::pow(static_cast<double>(dims[l]), exponent);
  }
  return value;
}

double weight_value(const WeightKappa& wk, double v) {
  if (v < 0.0) {
    throw Error("weight_value needs v >= 0");
  }
  return 1.0 / (1.0 + std::pow(v, wk.kappa));
}

CertReport check_membership(const NetworkFamilyBuilder& builder,
                            const FunctionFamily& family,
                            const GrowthBudget& budget, const WeightKappa& wk,
                            const IndexGrid& grid,
                            const std::vector<double>& eps_list,
                            const SamplePlan& plan) {
  if (grid.indices.empty()) {
    throw Error("certification grid must be nonempty");
  }
  if (eps_list.empty()) {
    throw Error("certification needs at least one accuracy");
  }
  for (double eps : eps_list) {
    if (!(eps > 0.0) || eps > 1.0) {
      throw Error("accuracies must lie in (0, 1]");
    }
  }

  const std::size_t n_eps = eps_list.size();
  const std::size_t total = grid.indices.size() * n_eps;
  std::vector<CertRow> rows(total);

  parallel_for(total, [&](std::size_t flat) {
    const Index& index = grid.indices[flat / n_eps];
    const double eps = eps_list[flat % n_eps];

    const std::vector<long long> dims = grid.dim_map(index);
    validate_dims(dims, grid.dim_count);
    const auto [in_dim, out_dim] = grid.io_map(index);

    CertRow row;
    row.index = index;
    row.eps = eps;
    row.budget = budget_value(budget, eps, dims);

    const Ann net = builder.build(index, eps);
    if (net.input_dim() != in_dim || net.output_dim() != out_dim) {
      throw DimMismatchError(
          "built network is " + std::to_string(net.input_dim()) + " -> " +
          std::to_string(net.output_dim()) + " but the grid declares " +
          std::to_string(in_dim) + " -> " + std::to_string(out_dim));
    }
    row.params = net.param_count();

    bool envelope_bounded = false;
    double G = kInf, H = kInf;
    if (builder.envelope) {
      G = builder.envelope->G(index, eps);
      H = builder.envelope->H(index, eps);
      envelope_bounded = std::isfinite(G) && std::isfinite(H);
    }

    if (!net.all_finite()) {
      row.weighted_error = kInf;
      if (envelope_bounded) {
        row.growth_ok = false;
      }
      row.row_pass = false;
      rows[flat] = std::move(row);
      return;
    }

    const std::vector<Vector> samples =
        make_samples(plan, in_dim, index_salt(index));
    Matrix points(in_dim, static_cast<Eigen::Index>(samples.size()));
    for (std::size_t j = 0; j < samples.size(); ++j) {
      points.col(static_cast<Eigen::Index>(j)) = samples[j];
    }
    const Matrix outputs = realize_batch(net, builder.activation, points);

    double worst = 0.0;
    bool growth_ok = true;
    for (std::size_t j = 0; j < samples.size(); ++j) {
      const Eigen::Index col = static_cast<Eigen::Index>(j);
      const Vector target = family.eval(index, samples[j]);
      if (target.size() != out_dim) {
        throw DimMismatchError("family output length " +
                               std::to_string(target.size()) +
                               " != declared output dim " +
                               std::to_string(out_dim));
      }
      const double radius = samples[j].norm();
      const double err =
          (target - outputs.col(col)).norm() * weight_value(wk, radius);
      worst = std::max(worst, err);
      if (envelope_bounded && outputs.col(col).norm() > G * (H + radius)) {
        growth_ok = false;
      }
    }
    row.weighted_error = worst;
    if (envelope_bounded) {
      row.growth_ok = growth_ok;
    }
    row.row_pass = static_cast<double>(row.params) <= row.budget &&
                   row.weighted_error <= eps &&
                   !(row.growth_ok.has_value() && !*row.growth_ok);
    rows[flat] = std::move(row);
  });

  CertReport report;
  report.rows = std::move(rows);
  report.plan = plan;
  report.pass = true;
  double fitted = 0.0;
  for (const CertRow& row : report.rows) {
    report.pass = report.pass && row.row_pass;
    report.worst_error = std::max(report.worst_error, row.weighted_error);
    const std::vector<long long> dims = grid.dim_map(row.index);
    double k_here =
        static_cast<double>(row.params) * std::pow(row.eps, budget.r0);
    for (std::size_t l = 0; l < dims.size(); ++l) {
      const double exponent = l < budget.r.size() ? budget.r[l] : 0.0;
      k_here *= std::pow(static_cast<double>(dims[l]), -exponent);
    }
    fitted = std::max(fitted, k_here);
  }
  report.fitted_K = fitted;
  return report;
}

std::string cert_report_json(const CertReport& report) {
  Json doc;
  doc["fitted_K"] = json_double(report.fitted_K);
  doc["pass"] = report.pass;
  Json rows = Json::array();
  for (const CertRow& row : report.rows) {
    Json jr;
    jr["index"] = row.index;
    jr["eps"] = json_double(row.eps);
    jr["params"] = row.params;
    jr["budget"] = json_double(row.budget);
    jr["weighted_error"] = json_double(row.weighted_error);
    jr["growth_ok"] =
        row.growth_ok.has_value() ? Json(*row.growth_ok) : Json(nullptr);
    rows.push_back(std::move(jr));
  }
  doc["rows"] = std::move(rows);
  doc["sample_plan"] = Json{{"rho_max", json_double(report.plan.rho_max)},
                            {"radial_steps", report.plan.radial_steps},
                            {"random_points", report.plan.random_points},
                            {"seed", report.plan.seed}};
  doc["seed"] = report.plan.seed;
  return doc.dump();
}

NetworkFamilyBuilder combinator_linear(const NetworkFamilyBuilder& bf,
                                       const NetworkFamilyBuilder& bg,
                                       double lambda, const Activation& act) {
  NetworkFamilyBuilder out;
  out.activation = act;
  const auto build_f = bf.build;
  const auto build_g = bg.build;
  out.build = [build_f, build_g, lambda, act](const Index& index, double eps) {
    const Ann f = build_f(index, eps / (2.0 * std::max(std::abs(lambda), 1.0)));
    const Ann g = build_g(index, eps / 2.0);
    return linear_combination(lambda, f, 1.0, g, act).network;
  };
  return out;
}

long long limit_step_count(double D, double R,
                           const std::vector<double>& alpha,
                           const std::vector<long long>& dims, double delta) {
  if (!(R > 0.0)) {
    throw NonpositiveRError("limit step rule needs R > 0, got " +
                            std::to_string(R));
  }
  if (!(delta > 0.0)) {
    throw Error("limit step rule needs delta > 0");
  }
  double product = 1.0;
  for (std::size_t l = 0; l < dims.size(); ++l) {
    const double exponent = l < alpha.size() ? alpha[l] : 0.0;
    product *= std::pow(static_cast<double>(dims[l]), exponent);
  }
  const double q = std::pow(D * (2.0 / delta) * product, 1.0 / R);
  if (!(q >= 1.0)) {
    return 1;
  }
  if (q > 9.0e18) {
    throw Error("limit step count overflows");
  }
  return static_cast<long long>(std::ceil(q));
}

NetworkFamilyBuilder combinator_limit(
    const std::function<NetworkFamilyBuilder(long long)>& builders_by_n,
    double D, double R, const std::vector<double>& alpha,
    const std::function<std::vector<long long>(const Index&)>& dim_map) {
  if (!(R > 0.0)) {
    throw NonpositiveRError("limit combinator needs R > 0, got " +
                            std::to_string(R));
  }
  NetworkFamilyBuilder out;
  out.activation = builders_by_n(1).activation;
  out.build = [builders_by_n, D, R, alpha, dim_map](const Index& index,
                                                    double delta) {
    const long long n = limit_step_count(D, R, alpha, dim_map(index), delta);
    return builders_by_n(n).build(index, delta / 2.0);
  };
  return out;
}

GrowthBudget implied_budget(const RateDeclaration& rate, double budget_K) {
  if (!(rate.R > 0.0)) {
    throw NonpositiveRError("rate declaration needs R > 0, got " +
                            std::to_string(rate.R));
  }
  GrowthBudget budget;
  budget.K = budget_K;
  budget.r0 = rate.r0 / rate.R;
  const std::size_t n = std::max(rate.r.size(), rate.alpha.size());
  budget.r.resize(n, 0.0);
  for (std::size_t l = 0; l < n; ++l) {
    const double r_l = l < rate.r.size() ? rate.r[l] : 0.0;
    const double a_l = l < rate.alpha.size() ? rate.alpha[l] : 0.0;
    budget.r[l] = r_l + rate.r0 * a_l / rate.R;
  }
  return budget;
}

CertReport certify_from_rate(const NetworkFamilyBuilder& builder,
                             const RateDeclaration& rate, double budget_K,
                             const FunctionFamily& family,
                             const WeightKappa& wk, const IndexGrid& grid,
                             const std::vector<double>& eps_list,
                             const SamplePlan& plan) {
  return check_membership(builder, family, implied_budget(rate, budget_K), wk,
                          grid, eps_list, plan);
}

ComposedFamily combinator_compose_chain(
    const std::vector<NetworkFamilyBuilder>& factors,
    const std::vector<double>& lipschitz, const WeightKappa& wk,
    double rho_max, const Activation& act) {
  if (factors.empty()) {
    throw EmptyChainError("composition combinator needs at least one factor");
  }
  if (lipschitz.size() + 1 != factors.size()) {
    throw MissingLipschitzError(
        "need one Lipschitz constant per factor after the first: got " +
        std::to_string(lipschitz.size()) + " for " +
        std::to_string(factors.size()) + " factors");
  }

  ComposedFamily out;
  out.builder.activation = act;
  out.builder.build = [factors](const Index& index, double eps) {
    std::vector<Ann> nets;
    nets.reserve(factors.size());
    for (auto it = factors.rbegin(); it != factors.rend(); ++it) {
      nets.push_back(it->build(index, eps));
    }
    return compose_chain(nets).network;
  };

  out.predicted_multiplier = [factors, lipschitz, wk,
                              rho_max](const Index& index, double eps) {
    const std::size_t m = factors.size();
    // suffix[k] = product of the Lipschitz constants of factors after k
    std::vector<double> suffix(m, 1.0);
    for (std::size_t k = m - 1; k > 0; --k) {
      suffix[k - 1] = suffix[k] * lipschitz[k - 1];
    }
    double multiplier = 0.0;
    const int kGridPoints = 256;
    for (int sample = 0; sample < kGridPoints; ++sample) {
      const double v = rho_max * sample / (kGridPoints - 1);
      double propagated = v;
      double total = 0.0;
      for (std::size_t k = 0; k < m; ++k) {
        total += suffix[k] * (1.0 + std::pow(propagated, wk.kappa));
        if (k + 1 < m) {
          if (!factors[k].envelope) {
            return kInf;
          }
          const double G = factors[k].envelope->G(index, eps);
          const double H = factors[k].envelope->H(index, eps);
          if (!std::isfinite(G) || !std::isfinite(H)) {
            return kInf;
          }
          propagated = G * (H + propagated);
        }
      }
      multiplier = std::max(multiplier, total * weight_value(wk, v));
    }
    return multiplier;
  };
  return out;
}

NetworkFamilyBuilder combinator_euler_family(const NetworkFamilyBuilder& bf,
                                             double T, double c,
                                             const Activation& act) {
  if (!(T > 0.0)) {
    throw Error("Euler family combinator needs T > 0");
  }
  const auto split = [](const Index& extended) {
    if (extended.empty()) {
      throw Error("Euler family index must end with the step count");
    }
    const long long n = extended.back();
    if (n < 1) {
      throw Error("Euler family step count must be >= 1");
    }
    return std::make_pair(Index(extended.begin(), extended.end() - 1), n);
  };

  NetworkFamilyBuilder out;
  out.activation = act;
  const auto build_f = bf.build;
  out.build = [build_f, split, T, act](const Index& extended, double eps) {
    const auto [prefix, n] = split(extended);
    const Ann f = build_f(prefix, eps / std::max(T, 1.0));
    return euler_step_net(f, T / static_cast<double>(n), act);
  };

  GrowthEnvelope env;
  env.G = [split, c, T](const Index& extended, double) {
    const auto [prefix, n] = split(extended);
    (void)prefix;
    return 1.0 + c * T / static_cast<double>(n);
  };
  if (bf.envelope) {
    const auto base_H = bf.envelope->H;
    env.H = [split, base_H, T](const Index& extended, double eps) {
      const auto [prefix, n] = split(extended);
      (void)n;
      return base_H(prefix, eps / std::max(T, 1.0));
    };
    env.rho = bf.envelope->rho;
    env.beta = bf.envelope->beta;
  } else {
    env.H = [](const Index&, double) { return kInf; };
  }
  out.envelope = std::move(env);
  return out;
}

FunctionFamily product_family(const std::vector<FunctionFamily>& families) {
  FunctionFamily out;
  out.eval = [families](const Index& extended, const Vector& x) {
    if (extended.empty()) {
      throw Error("product family index must end with the member selector");
    }
    const long long j = extended.back();
    if (j < 0 || j >= static_cast<long long>(families.size())) {
      throw Error("product family selector " + std::to_string(j) +
                  " out of range");
    }
    const Index prefix(extended.begin(), extended.end() - 1);
    return families[static_cast<std::size_t>(j)].eval(prefix, x);
  };
  return out;
}

std::function<std::vector<long long>(const Index&)> product_dim_map(
    const std::function<std::vector<long long>(const Index&)>& d1, int len1,
    const std::function<std::vector<long long>(const Index&)>& d2) {
  return [d1, len1, d2](const Index& index) {
    if (static_cast<int>(index.size()) < len1) {
      throw Error("index shorter than the first dimension map's span");
    }
    const Index left(index.begin(), index.begin() + len1);
    const Index right(index.begin() + len1, index.end());
    std::vector<long long> dims = d1(left);
    const std::vector<long long> tail = d2(right);
    dims.insert(dims.end(), tail.begin(), tail.end());
    return dims;
  };
}

}  // namespace anncalc
