#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace qestkit::tool {

// One flat bag of options; each command reads the fields it understands and
// validates them. Mirrored by the --config file keys.
struct RunConfig {
  std::string command;
  std::string method = "auto";  // eigen | bloch | vectorized | xstate | auto
  double fd_step = 1e-5;
  double trunc_tol = 1e-12;
  std::string output = "json";  // json | csv
  long n_trials = 1;
  bool verify = false;
  bool no_timestamp = false;
  bool strict = false;

  std::string model;    // classical-fim: normal | qubit-pvm | table
  std::string family;   // qfi/qfim: unitary | thermal | heisenberg-xy | stencil
  std::string measure;  // correlations: lqu | lqfi | lqu-qudit | lqu-average | chain

  double mu = 0.0;
  double sigma2 = 1.0;
  double theta = 0.0;
  double beta = 1.0;
  double j_coupling = 1.0;
  double b_field = 0.0;
  double temperature = 1.0;

  std::string table_file, rho0_file, h_file, state_file;
  std::vector<std::string> plus_files, minus_files;  // stencil derivatives
  double stencil_h = 1e-3;

  std::vector<long> dims;  // correlations: overrides the state file dims
  long n_qubits = 0;

  std::string sweep_command, sweep_over;
  double sweep_from = 0.0;
  double sweep_to = 1.0;
  long sweep_points = 2;
};

// Runs the configured command, prints the report to stdout, and returns the
// process exit code (0 ok, 2 invalid input, 3 numerical failure).
int run(const RunConfig& cfg);

}  // namespace qestkit::tool
