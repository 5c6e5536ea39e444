#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "cli_app.hpp"

namespace {

using crcalc::cli::RunConfig;

struct Overrides {
  std::string config, out, problem, algorithm, alpha, beta, z0, backtracking;
  std::optional<std::uint64_t> seed;
  std::optional<double> step, grad_tol, damping, noise, lms_step, lms_noise;
  std::optional<int> max_iters;
  std::optional<long long> samples, n, steps;
  bool quiet = false;
  bool corrupt_gradient = false;
};

void add_common(CLI::App* sub, Overrides& o) {
  sub->add_option("--config", o.config, "JSON configuration file");
  sub->add_option("--out", o.out, "write the trace (CSV) or report to this file");
  sub->add_option("--seed", o.seed, "random seed");
  sub->add_flag("--quiet", o.quiet, "suppress the summary on stdout");
  sub->add_option("--problem", o.problem, "example1 | example2 | lms | custom-polynomial");
}

void add_optimizer(CLI::App* sub, Overrides& o) {
  sub->add_option("--algorithm", o.algorithm,
                  "identity | newton | quasi-newton | gauss-newton | quasi-gauss-newton");
  sub->add_option("--alpha", o.alpha, "model coefficient alpha, e.g. 1+1j");
  sub->add_option("--beta", o.beta, "model coefficient beta, e.g. 0.3-0.1j");
  sub->add_option("--z0", o.z0, "initial point (scalar problems)");
  sub->add_option("--step", o.step, "step size");
  sub->add_option("--max-iters", o.max_iters, "iteration limit");
  sub->add_option("--grad-tol", o.grad_tol, "gradient norm tolerance");
  sub->add_option("--damping", o.damping, "diagonal loading added to Q");
  sub->add_option("--backtracking", o.backtracking, "off | armijo");
  sub->add_option("--noise", o.noise, "noise variance of the synthetic data");
  sub->add_option("--samples", o.samples, "number of synthetic samples");
}

crcalc::Complex parse_complex_flag(const std::string& s, const std::string& name) {
  const auto c = crcalc::cli::parse_complex(s);
  if (!c) throw crcalc::cli::ConfigError(name + ": cannot parse complex value '" + s + "'");
  return *c;
}

RunConfig build_config(const Overrides& o) {
  RunConfig cfg;
  if (!o.config.empty()) crcalc::cli::load_config_file(cfg, o.config);
  if (!o.problem.empty()) cfg.problem = o.problem;
  if (!o.algorithm.empty()) {
    const auto k = crcalc::parse_qkind(o.algorithm);
    if (!k) throw crcalc::cli::ConfigError("--algorithm: unknown value '" + o.algorithm + "'");
    cfg.algorithm = *k;
  }
  if (!o.alpha.empty()) cfg.alpha = parse_complex_flag(o.alpha, "--alpha");
  if (!o.beta.empty()) cfg.beta = parse_complex_flag(o.beta, "--beta");
  if (!o.z0.empty()) {
    crcalc::CVector z(1);
    z(0) = parse_complex_flag(o.z0, "--z0");
    cfg.z0 = z;
  }
  if (!o.backtracking.empty()) {
    if (o.backtracking != "off" && o.backtracking != "armijo") {
      throw crcalc::cli::ConfigError("--backtracking: expected off or armijo");
    }
    cfg.armijo = o.backtracking == "armijo";
  }
  if (o.seed) cfg.seed = *o.seed;
  if (o.step) cfg.step = *o.step;
  if (o.grad_tol) cfg.grad_tol = *o.grad_tol;
  if (o.damping) cfg.damping = *o.damping;
  if (o.noise) cfg.noise = *o.noise;
  if (o.max_iters) cfg.max_iters = *o.max_iters;
  if (o.samples) cfg.n_samples = *o.samples;
  if (o.n) cfg.lms_n = *o.n;
  if (o.steps) cfg.lms_steps = *o.steps;
  if (o.lms_step) cfg.lms_step = *o.lms_step;
  if (o.lms_noise) cfg.lms_noise = *o.lms_noise;
  if (!o.out.empty()) cfg.trace_path = o.out;
  cfg.quiet = o.quiet;
  cfg.corrupt_gradient = o.corrupt_gradient;
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"crcalc: complex-variable optimization with Wirtinger calculus"};
  app.require_subcommand(1);
  Overrides o;

  auto* opt = app.add_subcommand("optimize", "minimize a real loss of complex parameters");
  add_common(opt, o);
  add_optimizer(opt, o);

  auto* chk = app.add_subcommand("check", "verify derivative and Hessian identities");
  add_common(chk, o);
  chk->add_option("--alpha", o.alpha, "model coefficient alpha");
  chk->add_option("--beta", o.beta, "model coefficient beta");
  chk->add_option("--samples", o.samples, "number of synthetic samples");
  chk->add_flag("--corrupt-gradient", o.corrupt_gradient, "negative control: perturb the analytic cogradient");

  auto* lms = app.add_subcommand("lms", "run the complex LMS adaptive filter");
  add_common(lms, o);
  lms->add_option("--n", o.n, "filter length");
  lms->add_option("--steps", o.steps, "number of samples");
  lms->add_option("--step", o.lms_step, "LMS step size");
  lms->add_option("--noise", o.lms_noise, "observation noise variance");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : crcalc::cli::kExitConfig;
  }

  RunConfig cfg;
  try {
    cfg = build_config(o);
    if (lms->parsed()) cfg.problem = "lms";
  } catch (const crcalc::cli::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return crcalc::cli::kExitConfig;
  }

  if (opt->parsed()) return crcalc::cli::cmd_optimize(cfg, std::cout, std::cerr);
  if (chk->parsed()) return crcalc::cli::cmd_check(cfg, std::cout, std::cerr);
  return crcalc::cli::cmd_lms(cfg, std::cout, std::cerr);
}
