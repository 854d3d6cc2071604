#include <cstdint>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "anncalc/algebra.hpp"
#include "anncalc/canonical.hpp"
#include "anncalc/certify.hpp"
#include "anncalc/flow.hpp"
#include "anncalc/format.hpp"
#include "anncalc/io.hpp"
#include "anncalc/ode.hpp"

namespace {

using namespace anncalc;

std::vector<double> parse_double_list(const std::string& text,
                                      const std::string& what) {
  std::vector<double> values;
  std::stringstream stream(text);
  std::string item;
  while (std::getline(stream, item, ',')) {
    try {
      std::size_t used = 0;
      values.push_back(std::stod(item, &used));
      if (used != item.size()) {
        throw std::invalid_argument(item);
      }
    } catch (const std::exception&) {
      throw Error("cannot parse " + what + " entry \"" + item + "\"");
    }
  }
  if (values.empty()) {
    throw Error(what + " list is empty");
  }
  return values;
}

std::vector<int> parse_int_list(const std::string& text,
                                const std::string& what) {
  std::vector<int> values;
  for (double v : parse_double_list(text, what)) {
    const int i = static_cast<int>(v);
    if (static_cast<double>(i) != v) {
      throw Error(what + " entries must be integers");
    }
    values.push_back(i);
  }
  return values;
}

std::vector<long long> parse_ll_list(const std::string& text,
                                     const std::string& what) {
  std::vector<long long> values;
  for (int v : parse_int_list(text, what)) {
    values.push_back(v);
  }
  return values;
}

Vector parse_point(const std::string& text) {
  const std::vector<double> values = parse_double_list(text, "point");
  Vector x(static_cast<Eigen::Index>(values.size()));
  for (std::size_t i = 0; i < values.size(); ++i) {
    x[static_cast<Eigen::Index>(i)] = values[i];
  }
  return x;
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw Error("cannot open " + path + " for writing");
  }
  out << text;
  if (!text.empty() && text.back() != '\n') {
    out << '\n';
  }
  if (!out) {
    throw Error("failed while writing " + path);
  }
}

bool is_field_name(const std::string& name) {
  return name == "decay" || name == "rotation";
}

struct BuildFlags {
  std::string problem = "decay";
  std::string g;
  int d = 1;
  double T = 1.0;
  double eps = 0.1;
  double kappa = 1.0;
  double c = 1.0;
  double radius = 10.0;
  int samples = 512;
  std::uint64_t seed = 0;
  double tol = 1e-10;
  long long n_cap = 65536;
  double split = 0.5;
  std::string out;
  std::string report;
  std::string csv;
  std::string d_list;
  std::string eps_list;
};

FlowBuildConfig make_config(const BuildFlags& flags) {
  FlowBuildConfig cfg;
  cfg.T = flags.T;
  cfg.eps = flags.eps;
  cfg.kappa.kappa = flags.kappa;
  cfg.c = flags.c;
  cfg.budget_split_disc = flags.split;
  cfg.budget_split_net = 1.0 - flags.split;
  cfg.n_cap = flags.n_cap;
  cfg.plan.rho_max = flags.radius;
  cfg.plan.random_points = flags.samples;
  cfg.plan.seed = flags.seed;
  cfg.reference_tol = flags.tol;
  return cfg;
}

int run_build(const BuildFlags& flags) {
  const std::string g_name =
      flags.g.empty() ? paired_terminal(flags.problem) : flags.g;
  const FlowProblem problem =
      make_problem(flags.problem, g_name, flags.d, flags.T);
  const FlowBuildConfig cfg = make_config(flags);
  const FlowBuildReport report =
      build_flow_network(canonical_f_builder(flags.problem),
                         canonical_g_builder(g_name), problem, cfg);
  save_file(flags.out, report.network, std::string("relu"));
  if (!flags.report.empty()) {
    write_text_file(flags.report, flow_report_json(report, cfg, flags.out));
  }
  std::cout << "n=" << report.n_chosen << " params=" << report.params
            << " weighted_error=" << format_double(
                   report.measured_weighted_error)
            << " pass=" << (report.pass ? 1 : 0) << '\n';
  return report.pass ? 0 : 2;
}

int run_eval(const std::string& net_path, const std::string& point_text) {
  const LoadedAnn loaded = load_file(net_path);
  for (const std::string& warning : loaded.warnings) {
    std::cerr << "warning: " << warning << '\n';
  }
  Activation act = Activation::rectifier();
  if (loaded.activation_hint) {
    if (auto parsed = Activation::from_hint(*loaded.activation_hint)) {
      act = *parsed;
    } else {
      std::cerr << "warning: unknown activation hint \""
                << *loaded.activation_hint << "\", using the rectifier\n";
    }
  }
  const Vector x = parse_point(point_text);
  const Vector y = realize(loaded.ann, act, x);
  for (Eigen::Index i = 0; i < y.size(); ++i) {
    if (i > 0) {
      std::cout << ' ';
    }
    std::cout << format_double(y[i]);
  }
  std::cout << '\n';
  return 0;
}

struct CertifyFlags {
  std::string problem = "decay";
  std::string d_list = "1,2,4";
  std::string eps_list = "0.5,0.25";
  double K = 2000.0;
  double r0 = 1.0;
  double r1 = 3.0;
  double kappa = 1.0;
  double radius = 10.0;
  int samples = 512;
  std::uint64_t seed = 0;
  std::string json_path;
};

int run_certify(const CertifyFlags& flags) {
  const bool field_problem = is_field_name(flags.problem);
  const NetworkFamilyBuilder builder =
      field_problem ? canonical_f_builder(flags.problem)
                    : canonical_g_builder(flags.problem);
  const FunctionFamily family = field_problem
                                    ? canonical_f_family(flags.problem)
                                    : canonical_g_family(flags.problem);
  IndexGrid grid;
  for (int d : parse_int_list(flags.d_list, "dimension")) {
    if (d < 1) {
      throw Error("dimensions must be >= 1");
    }
    grid.indices.push_back({d});
  }
  grid.dim_count = 1;
  grid.dim_map = [](const Index& index) {
    return std::vector<long long>{index.at(0)};
  };
  grid.io_map = [field_problem](const Index& index) {
    const int d = static_cast<int>(index.at(0));
    return std::make_pair(d, field_problem ? d : 1);
  };

  GrowthBudget budget;
  budget.K = flags.K;
  budget.r0 = flags.r0;
  budget.r = {flags.r1};
  WeightKappa wk{flags.kappa};
  SamplePlan plan;
  plan.rho_max = flags.radius;
  plan.random_points = flags.samples;
  plan.seed = flags.seed;

  const CertReport report =
      check_membership(builder, family, budget, wk, grid,
                       parse_double_list(flags.eps_list, "eps"), plan);
  if (!flags.json_path.empty()) {
    write_text_file(flags.json_path, cert_report_json(report));
  }
  std::cout << "pass=" << (report.pass ? 1 : 0)
            << " fitted_K=" << format_double(report.fitted_K)
            << " worst_error=" << format_double(report.worst_error) << '\n';
  return report.pass ? 0 : 2;
}

int run_sweep(const BuildFlags& flags) {
  const std::string g_name =
      flags.g.empty() ? paired_terminal(flags.problem) : flags.g;
  const std::vector<int> d_list = parse_int_list(flags.d_list, "dimension");
  const std::vector<double> eps_list =
      parse_double_list(flags.eps_list, "eps");
  FlowBuildConfig cfg = make_config(flags);
  const std::string problem_name = flags.problem;
  const double T = flags.T;
  const SweepTable table = sweep(
      canonical_f_builder(problem_name), canonical_g_builder(g_name),
      [&problem_name, &g_name, T](int d) {
        return make_problem(problem_name, g_name, d, T);
      },
      d_list, eps_list, cfg);

  const std::vector<std::string> comments = {
      "command=sweep",
      "problem=" + problem_name,
      "g=" + g_name,
      "d=" + flags.d_list,
      "eps=" + flags.eps_list,
      "T=" + format_double(flags.T),
      "kappa=" + format_double(flags.kappa),
      "c=" + format_double(flags.c),
      "radius=" + format_double(flags.radius),
      "samples=" + std::to_string(flags.samples),
      "seed=" + std::to_string(flags.seed),
      "tol=" + format_double(flags.tol),
      "n_cap=" + std::to_string(flags.n_cap),
      "split=" + format_double(flags.split),
  };
  const std::string csv = sweep_csv(table, comments);
  if (!flags.csv.empty()) {
    write_text_file(flags.csv, csv);
  } else {
    std::cout << csv;
  }
  bool all_pass = true;
  for (const SweepRow& row : table.rows) {
    all_pass = all_pass && row.pass;
  }
  std::cout << "rows=" << table.rows.size() << " pass=" << (all_pass ? 1 : 0)
            << '\n';
  return all_pass ? 0 : 2;
}

struct EulerFlags {
  std::string problem = "decay";
  int d = 1;
  double T = 1.0;
  std::string n_list = "8,16,32,64,128";
  int points = 32;
  double radius = 5.0;
  std::uint64_t seed = 0;
  double tol = 1e-10;
  std::string csv;
};

int run_euler_check(const EulerFlags& flags) {
  if (!is_field_name(flags.problem)) {
    throw Error("euler-check needs a field family (decay or rotation)");
  }
  const VectorField field = flags.problem == "decay"
                                ? decay_field(flags.d)
                                : rotation_field(flags.d);
  if (flags.points < 1) {
    throw Error("need at least one sample point");
  }
  SamplePlan plan;
  plan.rho_max = flags.radius;
  plan.radial_steps = 0;
  plan.random_points = flags.points;
  plan.seed = flags.seed;
  std::vector<Vector> points = make_samples(plan, flags.d, 0);
  points.erase(points.begin());  // drop the origin, keep the random draws

  const ConvergenceReport report = verify_euler_convergence(
      field, points, flags.T, parse_ll_list(flags.n_list, "n"), flags.tol);

  const std::vector<std::string> comments = {
      "command=euler-check",
      "problem=" + flags.problem,
      "d=" + std::to_string(flags.d),
      "T=" + format_double(flags.T),
      "n=" + flags.n_list,
      "points=" + std::to_string(flags.points),
      "radius=" + format_double(flags.radius),
      "seed=" + std::to_string(flags.seed),
      "tol=" + format_double(flags.tol),
  };
  const std::string csv = convergence_csv(report, comments);
  if (!flags.csv.empty()) {
    write_text_file(flags.csv, csv);
  } else {
    std::cout << csv;
  }
  std::cout << "rows=" << report.rows.size() << " slope="
            << (report.fitted_slope ? format_double(*report.fitted_slope)
                                    : std::string("none"))
            << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Feedforward network calculus: exact composition algebra, "
               "Euler flows, and approximation certification"};
  app.require_subcommand(1);

  BuildFlags build_flags;
  CLI::App* build = app.add_subcommand(
      "build", "Build a flow-approximation network for a canonical problem");
  build->add_option("--problem", build_flags.problem,
                    "field family: decay or rotation");
  build->add_option("--g", build_flags.g,
                    "terminal family: relu-sum-g or coord-g (default: the "
                    "conventional pairing)");
  build->add_option("--d", build_flags.d, "dimension")->required();
  build->add_option("--T", build_flags.T, "horizon");
  build->add_option("--eps", build_flags.eps, "target accuracy in (0,1]")
      ->required();
  build->add_option("--kappa", build_flags.kappa, "weight exponent");
  build->add_option("--c", build_flags.c, "declared constant");
  build->add_option("--radius", build_flags.radius, "certification radius");
  build->add_option("--samples", build_flags.samples, "random sample count");
  build->add_option("--seed", build_flags.seed, "sample seed");
  build->add_option("--tol", build_flags.tol, "reference integrator tol");
  build->add_option("--n-cap", build_flags.n_cap, "step-count cap");
  build->add_option("--split", build_flags.split,
                    "fraction of eps for discretization");
  build->add_option("--out", build_flags.out, "network output path")
      ->required();
  build->add_option("--report", build_flags.report, "report JSON path");

  std::string eval_net, eval_point;
  CLI::App* eval = app.add_subcommand(
      "eval", "Evaluate a serialized network at a point");
  eval->add_option("--net", eval_net, "network file")->required();
  eval->add_option("--point", eval_point, "comma-separated coordinates")
      ->required();

  CertifyFlags certify_flags;
  CLI::App* certify = app.add_subcommand(
      "certify", "Check a canonical family against a parameter budget");
  certify->add_option("--problem", certify_flags.problem,
                      "decay, rotation, relu-sum-g, or coord-g");
  certify->add_option("--d", certify_flags.d_list, "comma-separated dims");
  certify->add_option("--eps", certify_flags.eps_list,
                      "comma-separated accuracies");
  certify->add_option("--K", certify_flags.K, "budget constant");
  certify->add_option("--r0", certify_flags.r0, "accuracy exponent");
  certify->add_option("--r1", certify_flags.r1, "dimension exponent");
  certify->add_option("--kappa", certify_flags.kappa, "weight exponent");
  certify->add_option("--radius", certify_flags.radius,
                      "certification radius");
  certify->add_option("--samples", certify_flags.samples,
                      "random sample count");
  certify->add_option("--seed", certify_flags.seed, "sample seed");
  certify->add_option("--json", certify_flags.json_path, "report JSON path");

  BuildFlags sweep_flags;
  CLI::App* sweep_cmd = app.add_subcommand(
      "sweep", "Build networks over a (d, eps) grid and emit the scaling CSV");
  sweep_cmd->add_option("--problem", sweep_flags.problem,
                        "field family: decay or rotation");
  sweep_cmd->add_option("--g", sweep_flags.g, "terminal family");
  sweep_cmd->add_option("--d", sweep_flags.d_list, "comma-separated dims")
      ->required();
  sweep_cmd->add_option("--eps", sweep_flags.eps_list,
                        "comma-separated accuracies")
      ->required();
  sweep_cmd->add_option("--T", sweep_flags.T, "horizon");
  sweep_cmd->add_option("--kappa", sweep_flags.kappa, "weight exponent");
  sweep_cmd->add_option("--c", sweep_flags.c, "declared constant");
  sweep_cmd->add_option("--radius", sweep_flags.radius,
                        "certification radius");
  sweep_cmd->add_option("--samples", sweep_flags.samples,
                        "random sample count");
  sweep_cmd->add_option("--seed", sweep_flags.seed, "sample seed");
  sweep_cmd->add_option("--tol", sweep_flags.tol,
                        "reference integrator tol");
  sweep_cmd->add_option("--n-cap", sweep_flags.n_cap, "step-count cap");
  sweep_cmd->add_option("--split", sweep_flags.split,
                        "fraction of eps for discretization");
  sweep_cmd->add_option("--csv", sweep_flags.csv, "CSV output path");

  EulerFlags euler_flags;
  CLI::App* euler = app.add_subcommand(
      "euler-check", "Verify Euler convergence against the a-priori bound");
  euler->add_option("--problem", euler_flags.problem,
                    "field family: decay or rotation");
  euler->add_option("--d", euler_flags.d, "dimension")->required();
  euler->add_option("--T", euler_flags.T, "horizon");
  euler->add_option("--n", euler_flags.n_list, "comma-separated step counts");
  euler->add_option("--points", euler_flags.points, "sample point count");
  euler->add_option("--radius", euler_flags.radius, "sample radius");
  euler->add_option("--seed", euler_flags.seed, "sample seed");
  euler->add_option("--tol", euler_flags.tol, "reference integrator tol");
  euler->add_option("--csv", euler_flags.csv, "CSV output path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  try {
    if (build->parsed()) {
      return run_build(build_flags);
    }
    if (eval->parsed()) {
      return run_eval(eval_net, eval_point);
    }
    if (certify->parsed()) {
      return run_certify(certify_flags);
    }
    if (sweep_cmd->parsed()) {
      return run_sweep(sweep_flags);
    }
    if (euler->parsed()) {
      return run_euler_check(euler_flags);
    }
  } catch (const BoundViolatedError& e) {
    std::cerr << "certification failed: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 1;
}
