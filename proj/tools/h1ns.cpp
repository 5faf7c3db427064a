// Command-line front end: constants, kernel, simulate, verify.

#include "h1ns/aposteriori.hpp"
#include "h1ns/errors.hpp"
#include "h1ns/io.hpp"
#include "h1ns/kernel_bounds.hpp"
#include "h1ns/ns_solver.hpp"
#include "h1ns/parallel.hpp"

#include "CLI11.hpp"

#include <algorithm>
#include <iostream>
#include <optional>
#include <string>

namespace {

using h1ns::io::Json;

constexpr int kExitOk = 0;
constexpr int kExitRuntime = 1;
constexpr int kExitInvalid = 2;
constexpr int kExitFailed = 3;

void emit(const Json& doc, const std::string& out) {
  if (out.empty()) {
    std::cout << doc.dump(1) << '\n';
  } else {
    h1ns::io::write_json(out, doc);
  }
}

struct ConstantsArgs {
  double omega = 0.7;
  int dim = 3;
  int a = 1;
  double lambda = 150.0;
  double grid_step = 1e-3;
  std::string out;
};

int run_constants(const ConstantsArgs& args) {
  h1ns::NOptions nopt;
  nopt.grid_step = args.grid_step;
  const auto cert = h1ns::io::certify_constants({args.dim, args.omega}, args.a, args.lambda, nopt);
  Json doc = h1ns::io::to_json(cert);
  doc["header"] = h1ns::io::header("constants", {{"omega", args.omega},
                                                 {"d", args.dim},
                                                 {"a", args.a},
                                                 {"lambda", args.lambda},
                                                 {"grid_step", args.grid_step}});
  emit(doc, args.out);
  return kExitOk;
}

struct KernelArgs {
  std::vector<int> k;
  double omega = 0.7;
  std::optional<int> dim;
  double lambda = 150.0;
  std::string out;
};

int run_kernel(const KernelArgs& args) {
  const int d = static_cast<int>(args.k.size());
  if (args.dim && *args.dim != d) throw h1ns::InvalidArgument("--k has " + std::to_string(d) + " components but --dim is " + std::to_string(*args.dim));
  h1ns::LatticePoint k(d);
  for (int r = 0; r < d; ++r) k[r] = args.k[static_cast<std::size_t>(r)];
  const auto b = h1ns::kernel_bracket({{d, args.omega}, k, args.lambda});
  Json doc{{"format", "h1ns.kernel_bracket"}, {"version", h1ns::io::kFormatVersion}};
  doc["bracket"] = h1ns::io::to_json(b);
  doc["header"] = h1ns::io::header("kernel", {{"k", args.k}, {"omega", args.omega}, {"d", d}, {"lambda", args.lambda}});
  emit(doc, args.out);
  return kExitOk;
}

h1ns::io::ConstantsCertificate load_constants(const std::string& path, h1ns::SpaceParams params) {
  if (path.empty()) return h1ns::io::certify_constants(params, 1, 150.0);
  auto c = h1ns::io::constants_from_json(h1ns::io::read_json(path));
  if (c.params.d != params.d || c.params.omega != params.omega) {
    throw h1ns::InvalidArgument(path + ": constants were certified for different (d, omega)");
  }
  return c;
}

Json constants_used(const h1ns::io::ConstantsCertificate& c) {
  return {{"K_upper", c.K.upper}, {"N_upper", c.N.n_upper}, {"threshold_lower", c.threshold_lower}};
}

struct SimulateArgs {
  std::string config;
  std::string out;
  std::string constants;
  std::string summary;
};

h1ns::FourierField load_datum(const Json& cfg, const h1ns::SolveConfig& sc, const std::string& config_path) {
  if (!cfg.contains("datum")) throw h1ns::InvalidArgument("config.datum: missing");
  const Json& d = cfg["datum"];
  if (!d.is_object()) throw h1ns::InvalidArgument("config.datum: expected an object");
  if (d.contains("file")) {
    if (!d["file"].is_string()) throw h1ns::InvalidArgument("config.datum.file: expected a path");
    std::filesystem::path p = d["file"].get<std::string>();
    if (p.is_relative()) p = std::filesystem::path(config_path).parent_path() / p;
    return h1ns::io::field_from_json(h1ns::io::read_json(p));
  }
  auto field = [&](const char* key) -> const Json& {
    if (!d.contains(key)) throw h1ns::InvalidArgument(std::string("config.datum.") + key + ": missing");
    return d[key];
  };
  const Json& seed = field("seed");
  if (!seed.is_number_unsigned()) throw h1ns::InvalidArgument("config.datum.seed: expected a nonnegative integer");
  int cutoff = sc.M;
  if (d.contains("cutoff")) {
    if (!d["cutoff"].is_number_integer()) throw h1ns::InvalidArgument("config.datum.cutoff: expected an integer");
    cutoff = d["cutoff"].get<int>();
    if (cutoff < 1 || cutoff > 64) throw h1ns::InvalidArgument("config.datum.cutoff: must lie in [1, 64]");
  }
  const Json& norm = field("h1_norm");
  if (!norm.is_number() || !(norm.get<double>() >= 0.0)) throw h1ns::InvalidArgument("config.datum.h1_norm: expected a nonnegative number");
  return h1ns::random_field(seed.get<std::uint64_t>(), cutoff, sc.params, norm.get<double>());
}

int run_simulate(const SimulateArgs& args) {
  const Json cfg = h1ns::io::read_json(args.config);
  const auto sc = h1ns::io::config_from_json(cfg);
  const auto u0 = load_datum(cfg, sc, args.config);
  std::string out = args.out;
  if (out.empty() && cfg.contains("output")) {
    if (!cfg["output"].is_string()) throw h1ns::InvalidArgument("config.output: expected a path");
    std::filesystem::path p = cfg["output"].get<std::string>();
    if (p.is_relative()) p = std::filesystem::path(args.config).parent_path() / p;
    out = p.string();
  }
  const auto constants = load_constants(args.constants, sc.params);
  const auto cert = h1ns::global_certificate(u0, constants.K.upper, constants.N.n_upper);

  const auto traj = h1ns::picard_solve(u0, sc);
  if (!out.empty()) h1ns::io::write_json(out, h1ns::io::trajectory_to_json(traj));

  Json summary{{"format", "h1ns.simulation_summary"}, {"version", h1ns::io::kFormatVersion}};
  summary["header"] = h1ns::io::header("simulate", h1ns::io::config_to_json(sc));
  summary["constants"] = constants_used(constants);
  summary["certificate"] = h1ns::io::to_json(cert);
  if (cert.covered) {
    auto env = h1ns::envelope_check(traj, u0, constants.K.upper, constants.N.n_upper, 1e-3 * cert.h1_norm);
    env.margins.clear();
    summary["envelope"] = h1ns::io::to_json(env);
  } else {
    summary["envelope"] = nullptr;
  }
  const auto energy = h1ns::energy_law_defects(traj);
  summary["energy_law_max_defect"] = energy.empty() ? 0.0 : *std::max_element(energy.begin(), energy.end());
  summary["steps"] = sc.steps();
  summary["samples"] = traj.size();
  summary["final_time"] = traj.times.back();
  summary["final_h1_norm"] = traj.h1_norms.back();
  summary["initial_h1_norm"] = traj.h1_norms.front();
  summary["max_picard_iterations"] =
      traj.picard_iterations.empty() ? 0 : *std::max_element(traj.picard_iterations.begin(), traj.picard_iterations.end());
  summary["max_contraction_ratio"] =
      traj.contraction.empty() ? 0.0 : *std::max_element(traj.contraction.begin(), traj.contraction.end());
  summary["trajectory_file"] = out.empty() ? Json(nullptr) : Json(out);
  emit(summary, args.summary);
  return kExitOk;
}

struct VerifyArgs {
  std::string trajectory;
  std::optional<double> omega;
  std::string constants;
  double safety = 1.25;
  std::string reference;
  std::string quad = "refined";
  std::string out;
};

int run_verify(const VerifyArgs& args) {
  const auto traj = h1ns::io::trajectory_from_json(h1ns::io::read_json(args.trajectory));
  h1ns::SpaceParams params = traj.states.front().params();
  if (args.omega) params.omega = *args.omega;
  params.require_solver_range();
  const auto constants = load_constants(args.constants, params);

  h1ns::QuadConfig qc;
  if (args.quad == "trapezoid") {
    qc.mode = h1ns::QuadMode::Trapezoid;
  } else if (args.quad != "refined") {
    throw h1ns::InvalidArgument("--quad must be 'refined' or 'trapezoid'");
  }
  const auto est = h1ns::error_estimator(traj, params.omega, qc);
  h1ns::EstimatorSeries series{traj.times, h1ns::growth_estimator(traj), est.total, {}};
  const auto control = h1ns::solve_control_inequality(series, {constants.K.upper, 1.0, params.omega, args.safety});

  Json report{{"format", "h1ns.verification"}, {"version", h1ns::io::kFormatVersion}};
  report["header"] = h1ns::io::header("verify", {{"trajectory", args.trajectory},
                                                 {"omega", params.omega},
                                                 {"safety", args.safety},
                                                 {"quad", args.quad},
                                                 {"reference", args.reference.empty() ? Json(nullptr) : Json(args.reference)}});
  report["constants"] = constants_used(constants);
  report["estimator"] = h1ns::io::to_json(est);
  report["control"] = h1ns::io::to_json(control);
  bool pass = control.pass;
  if (!args.reference.empty() && control.pass) {
    const auto ref = h1ns::io::trajectory_from_json(h1ns::io::read_json(args.reference));
    const auto rep = h1ns::verify_against_reference(traj, ref, control.series.R);
    report["reference"] = h1ns::io::to_json(rep);
    pass = pass && rep.pass;
  }
  report["pass"] = pass;
  emit(report, args.out);
  if (!control.pass) std::cerr << "verification failed: " << control.reason << '\n';
  return pass ? kExitOk : kExitFailed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Certified constants, Galerkin simulation and a-posteriori verification for Navier-Stokes on the torus"};
  app.require_subcommand(1);
  unsigned threads = 0;
  app.add_option("--threads", threads, "Worker thread cap (0 = all cores)")->check(CLI::NonNegativeNumber);

  ConstantsArgs ca;
  auto* constants = app.add_subcommand("constants", "Certify K_omega, N_omega and the small-data threshold");
  constants->add_option("--omega", ca.omega, "Sobolev exponent")->capture_default_str();
  constants->add_option("--dim", ca.dim, "Space dimension")->capture_default_str();
  constants->add_option("--a", ca.a, "Fundamental-domain radius")->capture_default_str();
  constants->add_option("--lambda", ca.lambda, "Lattice-sum cutoff")->capture_default_str();
  constants->add_option("--grid-step", ca.grid_step, "Initial time step of the N scan")->capture_default_str();
  constants->add_option("--out", ca.out, "Write the certificate here instead of stdout");

  KernelArgs ka;
  auto* kernel = app.add_subcommand("kernel", "Two-sided bracket of the lattice kernel at one point");
  kernel->add_option("--k", ka.k, "Lattice point, e.g. --k 0 0 1")->required()->expected(1, 8);
  kernel->add_option("--omega", ka.omega, "Sobolev exponent")->capture_default_str();
  kernel->add_option("--dim", ka.dim, "Space dimension (defaults to the length of --k)");
  kernel->add_option("--lambda", ka.lambda, "Lattice-sum cutoff")->capture_default_str();
  kernel->add_option("--out", ka.out, "Write the bracket here instead of stdout");

  SimulateArgs sa;
  auto* simulate = app.add_subcommand("simulate", "Run the Galerkin solver from a JSON config");
  simulate->add_option("config", sa.config, "Solver config (JSON)")->required();
  simulate->add_option("--out", sa.out, "Trajectory output (overrides config.output)");
  simulate->add_option("--constants", sa.constants, "Constants certificate to use (computed when absent)");
  simulate->add_option("--summary", sa.summary, "Write the summary here instead of stdout");

  VerifyArgs va;
  auto* verify = app.add_subcommand("verify", "Solve the control inequality for a trajectory");
  verify->add_option("trajectory", va.trajectory, "Trajectory file (JSON)")->required();
  verify->add_option("--omega", va.omega, "Sobolev exponent (defaults to the trajectory's)");
  verify->add_option("--constants", va.constants, "Constants certificate to use (computed when absent)");
  verify->add_option("--safety", va.safety, "Factor applied to the solved radius, > 1")->capture_default_str();
  verify->add_option("--reference", va.reference, "Higher-resolution trajectory to compare against");
  verify->add_option("--quad", va.quad, "Residual quadrature: refined or trapezoid")->capture_default_str();
  verify->add_option("--out", va.out, "Write the report here instead of stdout");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitInvalid;
  }

  h1ns::set_max_threads(threads);
  CLI::App* active = app.get_subcommands().front();
  try {
    if (active == constants) return run_constants(ca);
    if (active == kernel) return run_kernel(ka);
    if (active == simulate) return run_simulate(sa);
    return run_verify(va);
  } catch (const h1ns::InvalidArgument& e) {
    std::cerr << "error: " << e.what() << "\n\n" << active->help();
    return kExitInvalid;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
}
