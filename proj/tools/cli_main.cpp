#include <cstdlib>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <omp.h>

#include "commands.hpp"

int main(int argc, char** argv) {
  if (const char* tn = std::getenv("QESTKIT_THREADS")) {
    const int n = std::atoi(tn);
    if (n > 0) omp_set_num_threads(n);
  }

  qestkit::tool::RunConfig cfg;
  CLI::App app{"Fisher information, quantum estimation bounds, and correlation measures"};
  app.set_config("--config");
  app.require_subcommand(1);

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--method", cfg.method, "eigen|bloch|vectorized|xstate|auto");
    sub->add_option("--fd-step", cfg.fd_step, "finite-difference step for family derivatives");
    sub->add_option("--trunc-tol", cfg.trunc_tol, "support truncation tolerance, in (0, 1e-3)");
    sub->add_option("--output", cfg.output, "json|csv");
    sub->add_option("--n-trials", cfg.n_trials, "trial count scaling the bounds");
    sub->add_flag("--verify", cfg.verify, "cross-check the matrix against a second method");
    sub->add_flag("--no-timestamp", cfg.no_timestamp, "omit the timestamp, byte-reproducible");
    sub->add_flag("--strict", cfg.strict, "turn partial sweep failures into a failing exit");
  };
  auto add_classical = [&](CLI::App* sub) {
    sub->add_option("--model", cfg.model, "normal|qubit-pvm|table");
    sub->add_option("--mu", cfg.mu, "normal mean");
    sub->add_option("--sigma2", cfg.sigma2, "normal variance");
    sub->add_option("--table", cfg.table_file, "probability table file (table model)");
  };
  auto add_family = [&](CLI::App* sub) {
    sub->add_option("--family", cfg.family, "unitary|thermal|heisenberg-xy|stencil");
    sub->add_option("--rho0", cfg.rho0_file, "initial state file (unitary family)");
    sub->add_option("--H", cfg.h_file, "Hamiltonian file (unitary and thermal families)");
    sub->add_option("--beta", cfg.beta, "inverse temperature (thermal family)");
    sub->add_option("--J", cfg.j_coupling, "coupling (heisenberg-xy family)");
    sub->add_option("--B", cfg.b_field, "field (heisenberg-xy family)");
    sub->add_option("--T", cfg.temperature, "temperature (heisenberg-xy family)");
    sub->add_option("--state", cfg.state_file, "state at theta (stencil family)");
    sub->add_option("--state-plus", cfg.plus_files, "states at theta + h e_mu (stencil)");
    sub->add_option("--state-minus", cfg.minus_files, "states at theta - h e_mu (stencil)");
    sub->add_option("--stencil-h", cfg.stencil_h, "stencil half-step");
  };
  auto add_theta = [&](CLI::App* sub) {
    sub->add_option("--theta", cfg.theta, "scalar parameter value");
  };

  auto* cls = app.add_subcommand("classical-fim", "classical Fisher information matrix");
  add_classical(cls);
  add_theta(cls);
  add_common(cls);

  auto* fi = app.add_subcommand("qfi", "quantum Fisher information, single parameter");
  add_family(fi);
  add_theta(fi);
  add_common(fi);

  auto* fim = app.add_subcommand("qfim", "quantum Fisher information matrix");
  add_family(fim);
  add_theta(fim);
  add_common(fim);

  auto* corr = app.add_subcommand("correlations", "quantum correlation measures");
  corr->add_option("--state", cfg.state_file, "density matrix file");
  corr->add_option("--measure", cfg.measure, "lqu|lqfi|lqu-qudit|lqu-average|chain");
  corr->add_option("--dims", cfg.dims, "subsystem dimensions, overrides the state file");
  corr->add_option("--n-qubits", cfg.n_qubits, "qubit count for lqu-average");
  add_common(corr);

  auto* sw = app.add_subcommand("sweep", "run a command over a one-parameter grid");
  sw->add_option("--run", cfg.sweep_command, "classical-fim|qfi|qfim")->required();
  sw->add_option("--over", cfg.sweep_over, "parameter name to sweep")->required();
  sw->add_option("--from", cfg.sweep_from, "grid start")->required();
  sw->add_option("--to", cfg.sweep_to, "grid end")->required();
  sw->add_option("--points", cfg.sweep_points, "grid size, >= 1");
  add_classical(sw);
  add_family(sw);
  add_theta(sw);
  add_common(sw);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help and friends
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }

  for (auto* sub : {cls, fi, fim, corr, sw})
    if (sub->parsed()) cfg.command = sub->get_name();
  return qestkit::tool::run(cfg);
}
