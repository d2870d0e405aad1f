#include "rcs/cli.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "rcs/bench.hpp"

namespace rcs {

namespace {

// Post-parse flag problems (missing method parameter, inconsistent dims)
// that should exit like any other usage error.
struct UsageFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Shortest decimal that parses back to exactly x, for config echo lines.
std::string fmt(double x) {
  char buf[40];
  for (int prec = 1; prec <= 17; ++prec) {
    std::snprintf(buf, sizeof(buf), "%.*g", prec, x);
    if (std::strtod(buf, nullptr) == x) break;
  }
  return buf;
}

struct GenArgs {
  std::size_t n = 100;
  std::size_t m = 25;
  std::size_t k = 6;
  double delta = 0.7;
  std::string semantics = "elementwise";
  std::string mode = "subsampled_identity";
  std::uint64_t seed = 0;
  std::string out_path;
  bool dump = false;
};

struct RecoverArgs {
  std::string instance_path;
  std::string method = "bp";
  double delta = 0.0;
  double lambda = 0.0;
  std::size_t sparsity = 0;
  double residual_tol = 0.0;
  bool has_delta = false;
  bool has_lambda = false;
  bool has_sparsity = false;
  bool has_residual_tol = false;
  double tau = 0.5;
  double tol = 1e-6;
  std::size_t max_iters = 50000;
  std::string out_path;
  std::string trace_path;
  bool dump = false;
};

struct BenchArgs {
  std::size_t n = 100;
  std::size_t m = 25;
  std::size_t k = 3;
  std::vector<std::size_t> m_list;
  std::vector<std::size_t> k_list;
  double delta = 0.7;
  std::string semantics = "elementwise";
  std::string mode = "subsampled_identity";
  std::string methods = "bp,auo";
  std::size_t trials = 100;
  double tau = 0.5;
  std::uint64_t seed = 0;
  std::size_t threads = 1;
  double solver_delta = 0.0;
  bool has_solver_delta = false;
  double lambda = 0.0;
  bool has_lambda = false;
  std::size_t omp_sparsity = 0;
  bool has_omp_sparsity = false;
  double tol = 1e-6;
  std::size_t max_iters = 50000;
  std::string out_path;
  bool dump = false;
};

struct ProfileArgs {
  std::size_t n = 100;
  std::size_t m = 25;
  std::size_t k = 6;
  double delta = 0.7;
  std::string semantics = "elementwise";
  std::string mode = "subsampled_identity";
  std::string methods = "bp,auo";
  std::size_t trials = 50;
  std::uint64_t seed = 0;
  std::size_t threads = 1;
  double solver_delta = 0.0;
  bool has_solver_delta = false;
  double lambda = 0.0;
  bool has_lambda = false;
  std::size_t omp_sparsity = 0;
  bool has_omp_sparsity = false;
  double tol = 1e-6;
  std::size_t max_iters = 50000;
  std::string out_path;
  bool dump = false;
};

std::vector<std::string> split_csv(const std::string& text) {
  std::vector<std::string> out;
  std::string token;
  std::istringstream in(text);
  while (std::getline(in, token, ',')) {
    if (!token.empty()) out.push_back(token);
  }
  return out;
}

/// Builds the method list for bench/profile. AUO uses --solver-delta when
/// given, the generator's --delta otherwise, so mismatched-delta studies
/// stay expressible.
std::vector<RecoveryMethod> parse_methods(const std::string& csv, double gen_delta,
                                          bool has_solver_delta, double solver_delta,
                                          bool has_lambda, double lambda,
                                          bool has_omp_sparsity, std::size_t omp_sparsity) {
  std::vector<RecoveryMethod> methods;
  for (const std::string& name : split_csv(csv)) {
    if (name == "bp") {
      methods.push_back(RecoveryMethod::bp());
    } else if (name == "auo") {
      const double d = has_solver_delta ? solver_delta : gen_delta;
      if (d <= 0.0) {
        throw UsageFailure("auo needs a positive delta (--delta or --solver-delta)");
      }
      methods.push_back(RecoveryMethod::auo(d));
    } else if (name == "ds") {
      if (!has_lambda) throw UsageFailure("method ds requires --lambda");
      methods.push_back(RecoveryMethod::ds(lambda));
    } else if (name == "omp") {
      if (!has_omp_sparsity) throw UsageFailure("method omp requires --omp-sparsity");
      methods.push_back(RecoveryMethod::omp_sparsity(omp_sparsity));
    } else {
      throw UsageFailure("unknown method '" + name + "'");
    }
  }
  if (methods.empty()) throw UsageFailure("--methods list is empty");
  return methods;
}

InstanceConfig make_base(std::size_t n, std::size_t m, std::size_t k, double delta,
                         const std::string& semantics, const std::string& mode,
                         std::uint64_t seed) {
  InstanceConfig config;
  config.N = n;
  config.M = m;
  config.K = k;
  config.delta = delta;
  config.delta_semantics = delta_semantics_from_string(semantics);
  config.matrix_mode = matrix_mode_from_string(mode);
  config.seed = seed;
  return config;
}

SolverSettings make_solver(double tol, std::size_t max_iters,
                           const std::string& trace_path = "") {
  SolverSettings settings;
  settings.eps_primal = tol;
  settings.eps_dual = tol;
  settings.eps_gap = tol;
  settings.max_iters = max_iters;
  settings.trace_path = trace_path;
  return settings;
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path);
  if (!out) throw Error("cannot open '" + path + "' for writing");
  out << content;
  if (!out) throw Error("write failed for '" + path + "'");
}

int do_gen(const GenArgs& args, std::ostream& out) {
  out << "config: gen n=" << args.n << " m=" << args.m << " k=" << args.k
      << " delta=" << fmt(args.delta) << " delta_semantics=" << args.semantics
      << " matrix_mode=" << args.mode << " seed=" << args.seed
      << " out=" << args.out_path << "\n";
  if (args.dump) return 0;
  InstanceConfig config =
      make_base(args.n, args.m, args.k, args.delta, args.semantics, args.mode, args.seed);
  try {
    config.validate();
  } catch (const Error& e) {
    throw UsageFailure(e.what());
  }
  const MeasurementInstance instance = gen_instance(config);
  write_instance(args.out_path, instance);
  out << "wrote " << args.out_path << ": N=" << config.N << " M=" << config.M
      << " K=" << config.K << " delta=" << fmt(config.delta)
      << " seed=" << config.seed << "\n";
  return 0;
}

int do_recover(const RecoverArgs& args, std::ostream& out, std::ostream& err) {
  out << "config: recover instance=" << args.instance_path
      << " method=" << args.method << " delta=" << fmt(args.delta)
      << " lambda=" << fmt(args.lambda) << " sparsity=" << args.sparsity
      << " residual_tol=" << fmt(args.residual_tol) << " tau=" << fmt(args.tau)
      << " tol=" << fmt(args.tol) << " max_iters=" << args.max_iters
      << " out=" << args.out_path << " trace=" << args.trace_path << "\n";
  if (args.dump) return 0;

  RecoveryMethod method;
  if (args.method == "bp") {
    method = RecoveryMethod::bp();
  } else if (args.method == "auo") {
    if (!args.has_delta) throw UsageFailure("--method auo requires --delta");
    method = RecoveryMethod::auo(args.delta);
  } else if (args.method == "ds") {
    if (!args.has_lambda) throw UsageFailure("--method ds requires --lambda");
    method = RecoveryMethod::ds(args.lambda);
  } else {
    if (!args.has_sparsity && !args.has_residual_tol) {
      throw UsageFailure("--method omp requires --sparsity or --residual-tol");
    }
    method.kind = RecoveryMethod::Kind::OMP;
    if (args.has_sparsity) method.sparsity = args.sparsity;
    if (args.has_residual_tol) method.residual_tol = args.residual_tol;
  }

  const MeasurementInstance instance = read_instance(args.instance_path);
  const SolverSettings settings = make_solver(args.tol, args.max_iters, args.trace_path);
  const RecoveryResult result =
      recover(instance.B, instance.y, method, settings, args.tau);

  out << "status: " << to_string(result.solver_status) << "\n";
  out << "iterations: " << result.iters << "\n";
  out << "objective: " << fmt(result.objective) << "\n";
  if (result.t_value) {
    const double t = *result.t_value;
    const double l1 = norm1(result.theta_hat);
    const Vec residual = sub(instance.y, matvec(instance.B, result.theta_hat));
    const double bound =
        std::sqrt(static_cast<double>(instance.config.M)) * args.delta * t;
    out << "t: " << fmt(t) << "\n";
    out << "l1_norm: " << fmt(l1) << " (<= t)\n";
    out << "residual_norm: " << fmt(norm2(residual)) << " (<= sqrt(M)*delta*t = "
        << fmt(bound) << ")\n";
  }
  out << "support:";
  for (std::size_t i : result.support) out << ' ' << i;
  out << "\n";
  if (!args.out_path.empty()) {
    std::ostringstream text;
    write_vector(text, result.theta_hat);
    write_text_file(args.out_path, text.str());
    out << "wrote " << args.out_path << "\n";
  }
  if (result.solver_status == SolveStatus::Infeasible ||
      result.solver_status == SolveStatus::Unbounded) {
    err << "error: solver declared the problem " << to_string(result.solver_status)
        << "; no estimate produced\n";
    return 1;
  }
  return 0;
}

int do_bench(const BenchArgs& args, std::ostream& out) {
  const bool sweep_m = !args.m_list.empty();
  const bool sweep_k = !args.k_list.empty();
  if (sweep_m == sweep_k) {
    throw UsageFailure("bench requires exactly one of --m-list / --k-list");
  }
  std::ostringstream list_text;
  const std::vector<std::size_t>& values = sweep_m ? args.m_list : args.k_list;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) list_text << ',';
    list_text << values[i];
  }
  out << "config: bench n=" << args.n << " m=" << args.m << " k=" << args.k << " "
      << (sweep_m ? "m_list" : "k_list") << "=" << list_text.str()
      << " delta=" << fmt(args.delta) << " delta_semantics=" << args.semantics
      << " matrix_mode=" << args.mode << " methods=" << args.methods
      << " trials=" << args.trials << " tau=" << fmt(args.tau)
      << " seed=" << args.seed << " threads=" << args.threads << " solver_delta="
      << (args.has_solver_delta ? fmt(args.solver_delta) : std::string("(delta)"))
      << " lambda=" << fmt(args.lambda) << " omp_sparsity=" << args.omp_sparsity
      << " tol=" << fmt(args.tol) << " max_iters=" << args.max_iters
      << " out=" << args.out_path << "\n";
  if (args.dump) return 0;

  SweepConfig config;
  config.base = make_base(args.n, args.m, args.k, args.delta, args.semantics,
                          args.mode, args.seed);
  config.sweep_variable = sweep_m ? SweepVariable::M : SweepVariable::K;
  config.sweep_values = values;
  config.methods = parse_methods(args.methods, args.delta, args.has_solver_delta,
                                 args.solver_delta, args.has_lambda, args.lambda,
                                 args.has_omp_sparsity, args.omp_sparsity);
  config.trials = args.trials;
  config.tau = args.tau;
  config.master_seed = args.seed;
  config.threads = args.threads;
  config.solver = make_solver(args.tol, args.max_iters);
  try {
    config.validate();
  } catch (const Error& e) {
    throw UsageFailure(e.what());
  }

  const RhoReport report = run_sweep(config);
  write_text_file(args.out_path, report_to_csv(report));
  out << "wrote " << args.out_path << " (" << report.rows.size() << " rows)\n";
  return 0;
}

int do_profile(const ProfileArgs& args, std::ostream& out) {
  out << "config: profile n=" << args.n << " m=" << args.m << " k=" << args.k
      << " delta=" << fmt(args.delta) << " delta_semantics=" << args.semantics
      << " matrix_mode=" << args.mode << " methods=" << args.methods
      << " trials=" << args.trials << " seed=" << args.seed
      << " threads=" << args.threads << " solver_delta="
      << (args.has_solver_delta ? fmt(args.solver_delta) : std::string("(delta)"))
      << " lambda=" << fmt(args.lambda) << " omp_sparsity=" << args.omp_sparsity
      << " tol=" << fmt(args.tol) << " max_iters=" << args.max_iters
      << " out=" << args.out_path << "\n";
  if (args.dump) return 0;

  ProfileConfig config;
  config.base = make_base(args.n, args.m, args.k, args.delta, args.semantics,
                          args.mode, args.seed);
  config.methods = parse_methods(args.methods, args.delta, args.has_solver_delta,
                                 args.solver_delta, args.has_lambda, args.lambda,
                                 args.has_omp_sparsity, args.omp_sparsity);
  config.trials = args.trials;
  config.master_seed = args.seed;
  config.threads = args.threads;
  config.solver = make_solver(args.tol, args.max_iters);
  try {
    config.validate();
  } catch (const Error& e) {
    throw UsageFailure(e.what());
  }

  const ProfileResult result = run_profile(config);
  write_text_file(args.out_path, profile_to_csv(result));
  out << "wrote " << args.out_path << " (" << result.true_profile.size()
      << " rows)\n";
  return 0;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Sparse signal recovery under bounded measurement-matrix uncertainty"};
  app.name("robustcs");
  app.require_subcommand(1);

  GenArgs gen_args;
  CLI::App* gen_cmd = app.add_subcommand("gen", "generate a measurement instance file");
  gen_cmd->add_option("--n", gen_args.n, "signal length")->capture_default_str();
  gen_cmd->add_option("--m", gen_args.m, "measurement count")->capture_default_str();
  gen_cmd->add_option("--k", gen_args.k, "sparsity")->capture_default_str();
  gen_cmd->add_option("--delta", gen_args.delta, "perturbation bound")->capture_default_str();
  gen_cmd->add_option("--delta-semantics", gen_args.semantics, "elementwise|row_l1")
      ->capture_default_str()
      ->check(CLI::IsMember({"elementwise", "row_l1"}));
  gen_cmd->add_option("--matrix-mode", gen_args.mode, "subsampled_identity|gaussian")
      ->capture_default_str()
      ->check(CLI::IsMember({"subsampled_identity", "gaussian"}));
  gen_cmd->add_option("--seed", gen_args.seed, "master seed")->capture_default_str();
  gen_cmd->add_option("--out", gen_args.out_path, "instance file path")->required();
  gen_cmd->add_flag("--dump-config", gen_args.dump, "print resolved configuration and exit");

  RecoverArgs rec_args;
  CLI::App* rec_cmd = app.add_subcommand("recover", "recover a sparse signal from an instance file");
  rec_cmd->add_option("--instance", rec_args.instance_path, "instance file path")->required();
  rec_cmd->add_option("--method", rec_args.method, "bp|auo|ds|omp")
      ->required()
      ->check(CLI::IsMember({"bp", "auo", "ds", "omp"}));
  rec_cmd->add_option("--delta", rec_args.delta, "auo uncertainty bound");
  rec_cmd->add_option("--lambda", rec_args.lambda, "ds residual-correlation bound");
  rec_cmd->add_option("--sparsity", rec_args.sparsity, "omp atom budget");
  rec_cmd->add_option("--residual-tol", rec_args.residual_tol, "omp residual stop");
  rec_cmd->add_option("--tau", rec_args.tau, "support threshold in (0,1)")->capture_default_str();
  rec_cmd->add_option("--tol", rec_args.tol, "solver tolerance")->capture_default_str();
  rec_cmd->add_option("--max-iters", rec_args.max_iters, "solver iteration cap")->capture_default_str();
  rec_cmd->add_option("--out", rec_args.out_path, "write theta_hat here");
  rec_cmd->add_option("--trace", rec_args.trace_path, "write iteration trace CSV here");
  rec_cmd->add_flag("--dump-config", rec_args.dump, "print resolved configuration and exit");

  BenchArgs bench_args;
  CLI::App* bench_cmd = app.add_subcommand("bench", "Monte Carlo rho sweep, CSV output");
  bench_cmd->add_option("--n", bench_args.n, "signal length")->capture_default_str();
  bench_cmd->add_option("--m", bench_args.m, "measurement count (fixed when sweeping K)")->capture_default_str();
  bench_cmd->add_option("--k", bench_args.k, "sparsity (fixed when sweeping M)")->capture_default_str();
  bench_cmd->add_option("--m-list", bench_args.m_list, "measurement counts to sweep")->delimiter(',');
  bench_cmd->add_option("--k-list", bench_args.k_list, "sparsities to sweep")->delimiter(',');
  bench_cmd->add_option("--delta", bench_args.delta, "perturbation bound")->capture_default_str();
  bench_cmd->add_option("--delta-semantics", bench_args.semantics, "elementwise|row_l1")
      ->capture_default_str()
      ->check(CLI::IsMember({"elementwise", "row_l1"}));
  bench_cmd->add_option("--matrix-mode", bench_args.mode, "subsampled_identity|gaussian")
      ->capture_default_str()
      ->check(CLI::IsMember({"subsampled_identity", "gaussian"}));
  bench_cmd->add_option("--methods", bench_args.methods, "comma list of bp,auo,ds,omp")->capture_default_str();
  bench_cmd->add_option("--trials", bench_args.trials, "Monte Carlo trials per sweep value")->capture_default_str();
  bench_cmd->add_option("--tau", bench_args.tau, "support threshold in (0,1)")->capture_default_str();
  bench_cmd->add_option("--seed", bench_args.seed, "master seed")->capture_default_str();
  bench_cmd->add_option("--threads", bench_args.threads, "worker cap")->capture_default_str();
  bench_cmd->add_option("--solver-delta", bench_args.solver_delta, "auo delta override");
  bench_cmd->add_option("--lambda", bench_args.lambda, "ds bound");
  bench_cmd->add_option("--omp-sparsity", bench_args.omp_sparsity, "omp atom budget");
  bench_cmd->add_option("--tol", bench_args.tol, "solver tolerance")->capture_default_str();
  bench_cmd->add_option("--max-iters", bench_args.max_iters, "solver iteration cap")->capture_default_str();
  bench_cmd->add_option("--out", bench_args.out_path, "report CSV path")->required();
  bench_cmd->add_flag("--dump-config", bench_args.dump, "print resolved configuration and exit");

  ProfileArgs prof_args;
  CLI::App* prof_cmd = app.add_subcommand("profile", "fixed-support averaged recovery profile, CSV output");
  prof_cmd->add_option("--n", prof_args.n, "signal length")->capture_default_str();
  prof_cmd->add_option("--m", prof_args.m, "measurement count")->capture_default_str();
  prof_cmd->add_option("--k", prof_args.k, "sparsity")->capture_default_str();
  prof_cmd->add_option("--delta", prof_args.delta, "perturbation bound")->capture_default_str();
  prof_cmd->add_option("--delta-semantics", prof_args.semantics, "elementwise|row_l1")
      ->capture_default_str()
      ->check(CLI::IsMember({"elementwise", "row_l1"}));
  prof_cmd->add_option("--matrix-mode", prof_args.mode, "subsampled_identity|gaussian")
      ->capture_default_str()
      ->check(CLI::IsMember({"subsampled_identity", "gaussian"}));
  prof_cmd->add_option("--methods", prof_args.methods, "comma list of bp,auo,ds,omp")->capture_default_str();
  prof_cmd->add_option("--trials", prof_args.trials, "Monte Carlo trials")->capture_default_str();
  prof_cmd->add_option("--seed", prof_args.seed, "master seed")->capture_default_str();
  prof_cmd->add_option("--threads", prof_args.threads, "worker cap")->capture_default_str();
  prof_cmd->add_option("--solver-delta", prof_args.solver_delta, "auo delta override");
  prof_cmd->add_option("--lambda", prof_args.lambda, "ds bound");
  prof_cmd->add_option("--omp-sparsity", prof_args.omp_sparsity, "omp atom budget");
  prof_cmd->add_option("--tol", prof_args.tol, "solver tolerance")->capture_default_str();
  prof_cmd->add_option("--max-iters", prof_args.max_iters, "solver iteration cap")->capture_default_str();
  prof_cmd->add_option("--out", prof_args.out_path, "profile CSV path")->required();
  prof_cmd->add_flag("--dump-config", prof_args.dump, "print resolved configuration and exit");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  rec_args.has_delta = rec_cmd->count("--delta") > 0;
  rec_args.has_lambda = rec_cmd->count("--lambda") > 0;
  rec_args.has_sparsity = rec_cmd->count("--sparsity") > 0;
  rec_args.has_residual_tol = rec_cmd->count("--residual-tol") > 0;
  bench_args.has_solver_delta = bench_cmd->count("--solver-delta") > 0;
  bench_args.has_lambda = bench_cmd->count("--lambda") > 0;
  bench_args.has_omp_sparsity = bench_cmd->count("--omp-sparsity") > 0;
  prof_args.has_solver_delta = prof_cmd->count("--solver-delta") > 0;
  prof_args.has_lambda = prof_cmd->count("--lambda") > 0;
  prof_args.has_omp_sparsity = prof_cmd->count("--omp-sparsity") > 0;

  try {
    if (gen_cmd->parsed()) return do_gen(gen_args, out);
    if (rec_cmd->parsed()) return do_recover(rec_args, out, err);
    if (bench_cmd->parsed()) return do_bench(bench_args, out);
    if (prof_cmd->parsed()) return do_profile(prof_args, out);
    err << "error: no subcommand\n";
    return 2;
  } catch (const UsageFailure& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace rcs
