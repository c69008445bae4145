#include "sqr/cli.hpp"

#include <CLI11.hpp>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <ostream>
#include <sstream>

#include "sqr/error.hpp"
#include "sqr/io.hpp"
#include "sqr/model_selection.hpp"
#include "sqr/simd.hpp"
#include "sqr/simulation.hpp"

namespace sqr::cli {

namespace fs = std::filesystem;

namespace {

struct Settings {
  // data
  std::string data;
  std::string target = "y";
  std::string coefficients;
  std::string out;

  // smoothing
  double tau = 0.5;
  std::string kernel = "gaussian";
  std::string bandwidth = "auto";

  // penalty
  std::string penalty = "scad";
  double lambda = 0.1;
  double a = 0.0;  // 0: family default
  int stages = 3;

  // solver
  std::string solver = "auto";
  double rho = 1.0;
  double epsilon = 1e-6;
  int max_iter = 5000;

  // cross-validation
  int folds = 5;
  int grid_size = 50;
  double min_ratio = 0.01;

  // simulation
  std::string noise = "gaussian";
  std::size_t n = 500;
  std::size_t p = 400;
  int reps = 20;
  std::vector<std::string> methods;
  std::size_t test_size = 0;

  std::uint64_t seed = 1;
  int threads = 1;
  std::string simd = "scalar";
};

KernelId kernel_of(const Settings& s) { return *parse_kernel(s.kernel); }

std::optional<double> literal_bandwidth(const Settings& s) {
  if (s.bandwidth == "auto") return std::nullopt;
  double h = 0.0;
  std::istringstream in(s.bandwidth);
  if (!(in >> h) || !in.eof() || !(h > 0.0)) {
    throw Error(Errc::InvalidArgument, "--bandwidth must be 'auto' or a positive number, got '" + s.bandwidth + "'");
  }
  return h;
}

double resolve_bandwidth(const Settings& s, std::size_t n, std::size_t p_features) {
  if (auto h = literal_bandwidth(s)) return *h;
  return default_bandwidth(n, std::max<std::size_t>(p_features, 2), s.tau);
}

PenaltySpec penalty_of(const Settings& s, double lambda) {
  const PenaltyFamily family = *parse_penalty(s.penalty);
  PenaltySpec spec = PenaltySpec::make(family, lambda);
  if (s.a > 0.0) spec.a = s.a;
  spec.validate();
  return spec;
}

SolverConfig solver_of(const Settings& s, KernelId kernel) {
  const std::string choice = s.solver == "auto" ? (kernel == KernelId::Uniform ? "cd" : "admm") : s.solver;
  if (choice == "cd") {
    CdConfig cfg;
    cfg.epsilon = s.epsilon;
    cfg.max_iter = s.max_iter;
    cfg.validate();
    return cfg;
  }
  AdmmConfig cfg;
  cfg.rho = s.rho;
  cfg.epsilon = s.epsilon;
  cfg.max_iter = s.max_iter;
  cfg.validate();
  return cfg;
}

fs::path out_dir(const Settings& s) {
  if (!s.out.empty()) return s.out;
  if (const char* env = std::getenv("SQR_OUT_DIR")) return env;
  return ".";
}

std::string fmt(double v) { return format_double(v); }

void write_manifest(const CLI::App& app, const fs::path& dir, const KeyValues& resolved) {
  std::string text = "# sqr run manifest; rerun with: sqr --config <this file>\n";
  for (const auto& [k, v] : resolved) text += "# resolved." + k + " = " + v + "\n";
  const CLI::App* sub = app.get_subcommands().front();
  text += "[" + sub->get_name() + "]\n" + sub->config_to_str(true, false);
  write_text(dir / "manifest.toml", text);
}

Dataset load(const Settings& s) {
  Dataset d = read_dataset(s.data, s.target);
  d.validate();
  return d;
}

CoefficientTable table_of(const Dataset& d, const Vector& beta, const Vector& weights) {
  return CoefficientTable{d.names, beta, weights};
}

int run_fit(const Settings& s, const CLI::App& app, std::ostream& out) {
  const Dataset data = load(s);
  const KernelId kernel = kernel_of(s);
  const SmoothSpec spec{s.tau, resolve_bandwidth(s, data.n(), data.p() - 1), kernel};
  spec.validate();
  const PenaltySpec pen = penalty_of(s, s.lambda);
  const SolverConfig solver = solver_of(s, kernel);

  const IRWResult irw = fit_irw(data, spec, pen, s.stages, solver);
  const FitResult& fit = irw.final_fit();
  const Vector& weights = irw.weights_per_stage[irw.stages.size() - 1];
  const fs::path dir = out_dir(s);
  write_coefficients(dir / "coefficients.csv", table_of(data, fit.beta, weights));

  KeyValues diag = {{"n", std::to_string(data.n())},
                    {"p", std::to_string(data.p())},
                    {"bandwidth", fmt(spec.h)},
                    {"stages_run", std::to_string(irw.stages.size())},
                    {"converged_at", irw.converged_at ? std::to_string(*irw.converged_at) : "none"},
                    {"all_converged", irw.all_converged() ? "true" : "false"},
                    {"objective", fmt(fit.objective)},
                    {"kkt_residual", fmt(fit.kkt_inf)},
                    {"model_size", std::to_string(support_of(fit.beta).size() - (fit.beta[0] != 0.0 ? 1 : 0))}};
  for (std::size_t k = 0; k < irw.stages.size(); ++k) {
    const std::string pre = "stage" + std::to_string(k + 1) + ".";
    diag.emplace_back(pre + "iterations", std::to_string(irw.stages[k].n_iter));
    diag.emplace_back(pre + "converged", irw.stages[k].converged ? "true" : "false");
    diag.emplace_back(pre + "kkt_residual", fmt(irw.stages[k].kkt_inf));
  }
  write_key_values(dir / "diagnostics.txt", diag);
  write_manifest(app, dir, {{"bandwidth", fmt(spec.h)}, {"simd", simd::isa_name(simd::active_isa())}});

  out << "fit: n=" << data.n() << " p=" << data.p() << " h=" << fmt(spec.h) << " stages=" << irw.stages.size()
      << " objective=" << fmt(fit.objective) << " kkt=" << fmt(fit.kkt_inf) << "\n";
  if (!irw.all_converged()) {
    out << "warning: solver did not converge; artifacts flagged in diagnostics.txt\n";
    return kNonConvergence;
  }
  return kOk;
}

int run_cv(const Settings& s, const CLI::App& app, std::ostream& out) {
  const Dataset data = load(s);
  const KernelId kernel = kernel_of(s);
  const SmoothSpec spec{s.tau, resolve_bandwidth(s, data.n(), data.p() - 1), kernel};
  spec.validate();

  CvOptions opts;
  opts.penalty = penalty_of(s, 1.0);
  opts.n_stages = s.stages;
  opts.folds = s.folds;
  opts.grid_size = s.grid_size;
  opts.min_ratio = s.min_ratio;
  opts.seed = s.seed;
  opts.solver = solver_of(s, kernel);
  opts.threads = s.threads;
  const CVResult cv = cross_validate(data, spec, opts);

  const fs::path dir = out_dir(s);
  std::string path = "lambda,mean_error,valid";
  for (int f = 0; f < s.folds; ++f) path += ",fold" + std::to_string(f + 1);
  path += "\n";
  for (std::size_t k = 0; k < cv.grid.size(); ++k) {
    path += fmt(cv.grid[k]) + "," + fmt(cv.mean_error[k]) + "," + (cv.valid[k] ? "1" : "0");
    for (std::size_t f = 0; f < cv.fold_errors.rows(); ++f) path += "," + fmt(cv.fold_errors(f, k));
    path += "\n";
  }
  write_text(dir / "cv_path.csv", path);
  const Vector& weights = cv.selected.weights_per_stage[cv.selected.stages.size() - 1];
  write_coefficients(dir / "coefficients.csv", table_of(data, cv.selected_fit.beta, weights));
  const bool converged = cv.selected.all_converged();
  write_key_values(dir / "cv_report.txt",
                   {{"bandwidth", fmt(spec.h)},
                    {"grid_size", std::to_string(cv.grid.size())},
                    {"selected_index", std::to_string(cv.selected_index)},
                    {"selected_lambda", fmt(cv.selected_lambda)},
                    {"selected_error", fmt(cv.mean_error[cv.selected_index])},
                    {"failed_cells", std::to_string(cv.failed_cells)},
                    {"nonconverged_cells", std::to_string(cv.nonconverged_cells)},
                    {"refit_converged", converged ? "true" : "false"},
                    {"objective", fmt(cv.selected_fit.objective)},
                    {"kkt_residual", fmt(cv.selected_fit.kkt_inf)}});
  write_manifest(app, dir, {{"bandwidth", fmt(spec.h)}, {"simd", simd::isa_name(simd::active_isa())}});

  out << "cv: selected lambda=" << fmt(cv.selected_lambda) << " (index " << cv.selected_index << " of "
      << cv.grid.size() << "), error=" << fmt(cv.mean_error[cv.selected_index]) << "\n";
  return converged && cv.nonconverged_cells == 0 ? kOk : kNonConvergence;
}

Scenario scenario_of(const Settings& s) {
  Scenario sc;
  sc.n = s.n;
  sc.p = s.p;
  sc.noise = *parse_noise(s.noise);
  sc.tau = s.tau;
  sc.seed = s.seed;
  if (!(sc.tau > 0.0 && sc.tau < 1.0)) {
    throw Error(Errc::InvalidArgument, "tau must lie in (0, 1), got " + fmt(sc.tau));
  }
  if (sc.n < 2) throw Error(Errc::InvalidArgument, "n must be >= 2");
  true_coefficients(sc.p);
  return sc;
}

int run_simulate(const Settings& s, const CLI::App& app, std::ostream& out) {
  const Scenario sc = scenario_of(s);
  const Generated g = generate(sc);
  const fs::path dir = out_dir(s);
  write_dataset(dir / "data.csv", g.data, s.target);
  const Vector reference = reference_coefficients(sc);
  write_coefficients(dir / "beta_star.csv", CoefficientTable{g.data.names, reference, {}});
  write_manifest(app, dir, {});
  out << "simulate: wrote " << sc.n << " rows x " << sc.p << " features (" << to_string(sc.noise) << " noise)\n";
  return kOk;
}

std::vector<Method> methods_of(const Settings& s) {
  if (s.methods.empty()) return default_methods();
  std::vector<Method> out;
  for (const auto& name : s.methods) out.push_back(*parse_method(name));
  return out;
}

int run_bench(const Settings& s, const CLI::App& app, std::ostream& out) {
  BenchOptions opts;
  opts.scenario = scenario_of(s);
  opts.methods = methods_of(s);
  opts.reps = s.reps;
  opts.master_seed = s.seed;
  opts.cv_folds = s.folds;
  opts.grid_size = s.grid_size;
  opts.min_ratio = s.min_ratio;
  opts.bandwidth = literal_bandwidth(s);
  opts.n_stages = s.stages;
  opts.threads = s.threads;
  opts.test_size = s.test_size;
  const BenchReport report = run_benchmark(opts);

  const fs::path dir = out_dir(s);
  const std::string table = format_table(report);
  write_text(dir / "results.csv", table);
  std::string reps = "method,rep,seed,ok,tpr,fpr,sse,model_size,pred_error\n";
  for (const auto& m : report.methods) {
    for (std::size_t r = 0; r < m.per_rep.size(); ++r) {
      reps += std::string(to_string(m.method)) + "," + std::to_string(r + 1) + "," +
              std::to_string(report.rep_seeds[r]) + ",";
      const auto& x = m.per_rep[r];
      reps += x ? "1," + fmt(x->tpr) + "," + fmt(x->fpr) + "," + fmt(x->sse) + "," + std::to_string(x->model_size) +
                      "," + fmt(x->pred_error)
                : std::string("0,,,,,");
      reps += "\n";
    }
  }
  write_text(dir / "replications.csv", reps);
  write_manifest(app, dir, {{"bandwidth", fmt(report.bandwidth)}, {"simd", simd::isa_name(simd::active_isa())}});
  out << table;
  return kOk;
}

int run_kkt_check(const Settings& s, const CLI::App&, std::ostream& out) {
  const Dataset data = load(s);
  const CoefficientTable coef = read_coefficients(s.coefficients);
  if (coef.beta.size() != data.p()) {
    throw DataError(Errc::DimensionMismatch, "coefficient file has " + std::to_string(coef.beta.size()) +
                                                 " terms, dataset has " + std::to_string(data.p()) + " columns");
  }
  const SmoothSpec spec{s.tau, resolve_bandwidth(s, data.n(), data.p() - 1), kernel_of(s)};
  spec.validate();
  const double kkt = kkt_residual(data, spec, coef.weights, coef.beta);
  out << "kkt_residual = " << fmt(kkt) << "\n";
  return kOk;
}

int run_improvement_cmd(const Settings& s, const CLI::App& app, std::ostream& out) {
  ImprovementOptions opts;
  opts.scenario = scenario_of(s);
  opts.lambda = s.lambda;
  opts.kernel = kernel_of(s);
  opts.bandwidth = literal_bandwidth(s);
  opts.penalty = *parse_penalty(s.penalty);
  opts.n_stages = s.stages;
  opts.reps = s.reps;
  opts.master_seed = s.seed;
  opts.threads = s.threads;
  const ImprovementReport report = run_improvement(opts);

  std::string text = "stage,mean_relative_improvement\n";
  for (std::size_t k = 0; k < report.mean.size(); ++k) text += std::to_string(k + 2) + "," + fmt(report.mean[k]) + "\n";
  const fs::path dir = out_dir(s);
  write_text(dir / "improvement.csv", text);
  std::string reps = "rep";
  for (std::size_t k = 0; k < report.mean.size(); ++k) reps += ",stage" + std::to_string(k + 2);
  reps += "\n";
  for (std::size_t r = 0; r < report.per_rep.size(); ++r) {
    reps += std::to_string(r + 1);
    for (double v : report.per_rep[r]) reps += "," + fmt(v);
    reps += "\n";
  }
  write_text(dir / "improvement_replications.csv", reps);
  write_manifest(app, dir, {{"zero_denominator_reps", std::to_string(report.zero_denominator_reps)}});
  out << text;
  return kOk;
}

void add_smoothing(CLI::App* cmd, Settings& s) {
  cmd->add_option("--tau", s.tau, "Quantile level in (0, 1)")->capture_default_str();
  cmd->add_option("--kernel", s.kernel, "Smoothing kernel")
      ->check(CLI::IsMember({"gaussian", "logistic", "uniform", "laplacian", "epanechnikov"}))
      ->capture_default_str();
  cmd->add_option("--bandwidth", s.bandwidth, "'auto' or a positive bandwidth h")->capture_default_str();
}

void add_penalty(CLI::App* cmd, Settings& s, bool with_lambda) {
  cmd->add_option("--penalty", s.penalty, "Penalty family")
      ->check(CLI::IsMember({"l1", "scad", "mcp", "capped-l1"}))
      ->capture_default_str();
  if (with_lambda) cmd->add_option("--lambda", s.lambda, "Regularization level")->capture_default_str();
  cmd->add_option("--a", s.a, "Concavity parameter (0 = family default)")->capture_default_str();
  cmd->add_option("--stages", s.stages, "Number of reweighting stages")->check(CLI::PositiveNumber)->capture_default_str();
}

void add_solver(CLI::App* cmd, Settings& s) {
  cmd->add_option("--solver", s.solver, "auto, cd (uniform kernel only) or admm")
      ->check(CLI::IsMember({"auto", "cd", "admm"}))
      ->capture_default_str();
  cmd->add_option("--rho", s.rho, "ADMM augmented-Lagrangian parameter")->capture_default_str();
  cmd->add_option("--epsilon", s.epsilon, "Convergence tolerance on the coefficient change")->capture_default_str();
  cmd->add_option("--max-iter", s.max_iter, "Iteration cap")->capture_default_str();
}

void add_cv(CLI::App* cmd, Settings& s) {
  cmd->add_option("--folds", s.folds, "Cross-validation folds")->check(CLI::Range(2, 1000))->capture_default_str();
  cmd->add_option("--grid-size", s.grid_size, "Number of lambda values")->check(CLI::Range(2, 10000))->capture_default_str();
  cmd->add_option("--min-ratio", s.min_ratio, "Smallest lambda as a fraction of lambda_max")
      ->check(CLI::Range(0.0, 1.0))
      ->capture_default_str();
}

void add_scenario(CLI::App* cmd, Settings& s) {
  cmd->add_option("--noise,--scenario", s.noise, "Noise family")
      ->check(CLI::IsMember({"gaussian", "t1.5", "cauchy", "mixture"}))
      ->capture_default_str();
  cmd->add_option("--n", s.n, "Sample size")->capture_default_str();
  cmd->add_option("--p", s.p, "Number of features (>= 19)")->capture_default_str();
  cmd->add_option("--tau", s.tau, "Quantile level in (0, 1)")->capture_default_str();
}

void add_common(CLI::App* cmd, Settings& s) {
  cmd->add_option("--out", s.out, "Output directory (default $SQR_OUT_DIR or .)");
  cmd->add_option("--seed", s.seed, "Random seed")->capture_default_str();
  cmd->add_option("--threads", s.threads, "Worker threads for cv/bench")->check(CLI::PositiveNumber)->capture_default_str();
  cmd->add_option("--simd", s.simd, "scalar (bit-reproducible reference) or auto")
      ->check(CLI::IsMember({"scalar", "auto"}))
      ->capture_default_str();
}

}  // namespace

int parse_and_dispatch(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  Settings s;
  CLI::App app{"Smoothed quantile regression with iteratively reweighted l1 penalties", "sqr"};
  app.set_config("--config", "", "Rerun from a manifest written by an earlier run");
  app.require_subcommand(0, 1);

  auto* fit = app.add_subcommand("fit", "Fit the reweighted estimator at a fixed lambda");
  fit->add_option("--data", s.data, "CSV dataset with header")->required();
  fit->add_option("--target", s.target, "Response column")->capture_default_str();
  add_smoothing(fit, s);
  add_penalty(fit, s, true);
  add_solver(fit, s);
  add_common(fit, s);

  auto* cv = app.add_subcommand("cv", "Cross-validate lambda");
  cv->add_option("--data", s.data, "CSV dataset with header")->required();
  cv->add_option("--target", s.target, "Response column")->capture_default_str();
  add_smoothing(cv, s);
  add_penalty(cv, s, false);
  add_solver(cv, s);
  add_cv(cv, s);
  add_common(cv, s);

  auto* sim = app.add_subcommand("simulate", "Write a generated scenario to disk");
  add_scenario(sim, s);
  sim->add_option("--target", s.target, "Response column name")->capture_default_str();
  add_common(sim, s);

  auto* bench = app.add_subcommand("bench", "Run the simulation benchmark");
  add_scenario(bench, s);
  bench->add_option("--reps", s.reps, "Replications")->check(CLI::Range(2, 100000))->capture_default_str();
  bench->add_option("--methods", s.methods, "Methods to run (default roster if empty)")
      ->check(CLI::IsMember({"ls-lasso", "sqr-lasso-uniform", "sqr-scad-uniform", "sqr-lasso-gaussian",
                             "sqr-scad-gaussian", "oracle-uniform", "oracle-gaussian"}));
  bench->add_option("--stages", s.stages, "Reweighting stages of the SCAD methods")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  bench->add_option("--bandwidth", s.bandwidth, "'auto' or a positive bandwidth h")->capture_default_str();
  bench->add_option("--test-size", s.test_size, "Test-set size (0 = n)")->capture_default_str();
  add_cv(bench, s);
  add_common(bench, s);

  auto* kkt = app.add_subcommand("kkt-check", "Print the KKT residual of a coefficient file");
  kkt->add_option("--data", s.data, "CSV dataset with header")->required();
  kkt->add_option("--coefficients", s.coefficients, "Coefficient file from fit or cv")->required();
  kkt->add_option("--target", s.target, "Response column")->capture_default_str();
  add_smoothing(kkt, s);

  auto* imp = app.add_subcommand("improvement", "Relative improvement per reweighting stage");
  add_scenario(imp, s);
  imp->add_option("--kernel", s.kernel, "Smoothing kernel")
      ->check(CLI::IsMember({"gaussian", "logistic", "uniform", "laplacian", "epanechnikov"}))
      ->capture_default_str();
  imp->add_option("--bandwidth", s.bandwidth, "'auto' or a positive bandwidth h")->capture_default_str();
  imp->add_option("--penalty", s.penalty, "Penalty family")
      ->check(CLI::IsMember({"l1", "scad", "mcp", "capped-l1"}))
      ->capture_default_str();
  imp->add_option("--lambda", s.lambda, "Fixed lambda (<= 0: 0.5 sqrt(log p / n))")->capture_default_str();
  imp->add_option("--stages", s.stages, "Reweighting stages")->capture_default_str();
  imp->add_option("--reps", s.reps, "Replications")->check(CLI::PositiveNumber)->capture_default_str();
  add_common(imp, s);

  // Subcommand-specific defaults, applied before parsing so explicit flags win.
  bench->preparse_callback([&s](std::size_t) { s.min_ratio = BenchOptions{}.min_ratio; });
  bench->get_option("--min-ratio")->default_str(fmt(BenchOptions{}.min_ratio));
  imp->preparse_callback([&s](std::size_t) {
    s.noise = "t1.5";
    s.kernel = "uniform";
    s.lambda = 0.0;
    s.stages = 7;
  });
  imp->get_option("--noise")->default_str("t1.5");
  imp->get_option("--kernel")->default_str("uniform");
  imp->get_option("--lambda")->default_str("0");
  imp->get_option("--stages")->default_str("7");

  for (auto* sub : {fit, cv, sim, bench, kkt, imp}) sub->configurable();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    app.exit(e, out, err);
    return kOk;
  } catch (const CLI::CallForAllHelp& e) {
    app.exit(e, out, err);
    return kOk;
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kUsage;
  }

  if (app.get_subcommands().empty()) {
    err << "a subcommand is required\n" << app.help();
    return kUsage;
  }

  if (s.simd == "auto") {
    simd::set_isa(simd::detect_isa());
  } else {
    simd::set_isa(simd::Isa::Scalar);
  }

  try {
    if (*fit) return run_fit(s, app, out);
    if (*cv) return run_cv(s, app, out);
    if (*sim) return run_simulate(s, app, out);
    if (*bench) return run_bench(s, app, out);
    if (*kkt) return run_kkt_check(s, app, out);
    if (*imp) return run_improvement_cmd(s, app, out);
  } catch (const DataError& e) {
    err << "data error (" << errc_name(e.code()) << "): " << e.what() << "\n";
    return kDataError;
  } catch (const Error& e) {
    err << "error (" << errc_name(e.code()) << "): " << e.what() << "\n";
    switch (e.code()) {
      case Errc::InvalidArgument:
      case Errc::NonUniformKernel:
      case Errc::AllUnpenalized:
        return kUsage;
      case Errc::DegenerateBand:
      case Errc::TooManyFailures:
        return kNonConvergence;
      default:
        return kDataError;
    }
  } catch (const fs::filesystem_error& e) {
    err << "error: " << e.what() << "\n";
    return kDataError;
  }
  return kUsage;
}

}  // namespace sqr::cli
