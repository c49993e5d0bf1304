#include "commands.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <utility>

#include <json.hpp>

#include "qestkit/classical.hpp"
#include "qestkit/correlations.hpp"
#include "qestkit/numkit.hpp"
#include "qestkit/qfi.hpp"
#include "qestkit/qfim.hpp"
#include "qestkit/states.hpp"
#include "report_writer.hpp"

namespace qestkit::tool {

namespace {

int exit_code_for(errc c) {
  switch (c) {
    case errc::convergence_failure:
    case errc::rank_deficient:
    case errc::solve_failure:
    case errc::extrapolation_unstable:
    case errc::degenerate_spectrum:
    case errc::singular_fim:
    case errc::range_violation:
    case errc::quadrature_failure:
    case errc::non_positive_information:
      return 3;  // the computation failed
    default:
      return 2;  // the request was invalid
  }
}

struct Outcome {
  Json result = Json::object();
  std::vector<std::pair<std::string, double>> scalars;  // sweep / csv columns
  std::vector<std::string> warnings;
  std::string method_used;
  Json params = Json::object();
  Json files = Json::object();
};

std::string fmt3(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

void validate_common(const RunConfig& cfg) {
  if (!(cfg.fd_step > 0)) fail(errc::bad_input, "fd_step must be positive");
  if (!(cfg.trunc_tol > 0) || !(cfg.trunc_tol < 1e-3))
    fail(errc::bad_input, "trunc_tol must lie in (0, 1e-3)");
  if (cfg.n_trials < 1) fail(errc::bad_input, "n_trials must be >= 1");
  if (cfg.output != "json" && cfg.output != "csv")
    fail(errc::bad_input, "output must be json or csv");
  static const char* methods[] = {"eigen", "bloch", "vectorized", "xstate", "auto"};
  if (std::find_if(std::begin(methods), std::end(methods),
                   [&](const char* m) { return cfg.method == m; }) == std::end(methods))
    fail(errc::bad_input, "method must be one of eigen|bloch|vectorized|xstate|auto");
}

// ---- classical ----

struct ClassicalSpec {
  ProbModel model;
  std::vector<double> theta;
  std::vector<std::string> names;
};

ClassicalSpec build_classical(const RunConfig& cfg, Outcome& out) {
  if (cfg.model == "normal") {
    if (!(cfg.sigma2 > 0)) fail(errc::domain_violation, "sigma2 must be positive");
    out.params.set("model", "normal").set("mu", cfg.mu).set("sigma2", cfg.sigma2);
    return {normal_model(), {cfg.mu, cfg.sigma2}, {"mu", "sigma2"}};
  }
  if (cfg.model == "qubit-pvm") {
    out.params.set("model", "qubit-pvm").set("theta", cfg.theta);
    return {qubit_pvm_prob_model(), {cfg.theta}, {"theta"}};
  }
  if (cfg.model == "table") {
    if (cfg.table_file.empty()) fail(errc::bad_input, "table model needs --table <file>");
    out.params.set("model", "table");
    out.files.set(cfg.table_file, Json(file_digest(cfg.table_file)));

    nlohmann::json j;
    try {
      std::ifstream in(cfg.table_file);
      if (!in) fail(errc::bad_input, "cannot open " + cfg.table_file);
      in >> j;
    } catch (const Error&) {
      throw;
    } catch (const std::exception& e) {
      fail(errc::bad_input, std::string("table parse: ") + e.what());
    }
    const auto np = j.at("n_params").get<std::size_t>();
    const auto k = j.at("outcomes").get<std::size_t>();
    const auto h = j.at("h").get<double>();
    auto theta = j.at("theta").get<std::vector<double>>();
    auto center = j.at("center").get<std::vector<double>>();
    auto plus = j.at("plus").get<std::vector<std::vector<double>>>();
    auto minus = j.at("minus").get<std::vector<std::vector<double>>>();
    if (!(h > 0) || np == 0 || k == 0 || theta.size() != np || center.size() != k ||
        plus.size() != np || minus.size() != np)
      fail(errc::bad_input, "table file is inconsistent");
    for (const auto& row : plus)
      if (row.size() != k) fail(errc::bad_input, "table file is inconsistent");
    for (const auto& row : minus)
      if (row.size() != k) fail(errc::bad_input, "table file is inconsistent");
    for (double p : center)
      if (!(p >= 0)) fail(errc::bad_input, "table probabilities must be nonnegative");

    ProbModel m;
    m.kind = ProbModel::Kind::discrete;
    m.n_params = np;
    m.n_outcomes = k;
    m.prob = [center](double x, const std::vector<double>&) {
      return center[static_cast<std::size_t>(x)];
    };
    m.score_analytic = [center, plus, minus, h](double x, const std::vector<double>&,
                                                std::size_t mu) {
      const auto i = static_cast<std::size_t>(x);
      if (center[i] <= 0) fail(errc::zero_probability, "score undefined at zero probability");
      return (plus[mu][i] - minus[mu][i]) / (2.0 * h * center[i]);
    };
    std::vector<std::string> names;
    for (std::size_t p = 0; p < np; ++p) names.push_back("theta" + std::to_string(p));
    return {std::move(m), std::move(theta), std::move(names)};
  }
  fail(errc::bad_input, "model must be normal, qubit-pvm, or table");
}

Outcome compute_classical(const RunConfig& cfg) {
  Outcome out;
  auto spec = build_classical(cfg, out);
  const auto rep = fisher_matrix(spec.model, spec.theta);
  out.method_used = "score-expectation";

  if (rep.regularity_residual > 1e-6)
    out.warnings.push_back("regularity residual " + fmt3(rep.regularity_residual) +
                           " exceeds 1e-6");
  if (rep.crb_pseudo_inverse)
    out.warnings.push_back("information matrix singular: bound uses the pseudo-inverse");

  RealMatrix crb_scaled = rep.crb;
  const std::size_t n = spec.theta.size();
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j2 = 0; j2 < n; ++j2)
      crb_scaled(i, j2) /= static_cast<double>(cfg.n_trials);

  Json names = Json::array();
  for (const auto& nm : spec.names) names.push(Json(nm));
  out.result.set("param_names", std::move(names));
  out.result.set("theta", real_vector_json(spec.theta));
  out.result.set("fim", real_matrix_json(rep.fim));
  out.result.set("crb", real_matrix_json(crb_scaled));
  out.result.set("crb_pseudo_inverse", Json(rep.crb_pseudo_inverse));
  out.result.set("regularity_residual", Json(rep.regularity_residual));
  out.result.set("n_trials", Json(cfg.n_trials));

  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j2 = i; j2 < n; ++j2)
      out.scalars.emplace_back("F_" + spec.names[i] + spec.names[j2], rep.fim(i, j2));
  for (std::size_t i = 0; i < n; ++i)
    out.scalars.emplace_back("crb_" + spec.names[i], crb_scaled(i, i));
  out.scalars.emplace_back("regularity_residual", rep.regularity_residual);
  return out;
}

// ---- quantum families ----

struct FamilySpec {
  ParamFamily fam;
  std::vector<double> theta;
  std::vector<std::string> names;
};

FamilySpec build_family(const RunConfig& cfg, Outcome& out) {
  if (cfg.family == "unitary") {
    if (cfg.rho0_file.empty() || cfg.h_file.empty())
      fail(errc::bad_input, "unitary family needs --rho0 and --H files");
    auto rho0 = load_state_json(cfg.rho0_file);
    auto h = load_matrix_json(cfg.h_file);
    out.params.set("family", "unitary").set("theta", cfg.theta);
    out.files.set(cfg.rho0_file, Json(file_digest(cfg.rho0_file)));
    out.files.set(cfg.h_file, Json(file_digest(cfg.h_file)));
    return {unitary_family(rho0, h), {cfg.theta}, {"theta"}};
  }

  if (cfg.family == "thermal") {
    if (cfg.h_file.empty()) fail(errc::bad_input, "thermal family needs an --H file");
    auto h = load_matrix_json(cfg.h_file);
    out.params.set("family", "thermal").set("beta", cfg.beta);
    out.files.set(cfg.h_file, Json(file_digest(cfg.h_file)));
    const auto eig = hermitian_eigen(h);
    const std::size_t d = h.rows();
    ParamFamily fam(
        1, [h](const std::vector<double>& th) { return thermal_state(h, th[0]); },
        [eig, d](const std::vector<double>& th, std::size_t) {
          // d p_i / d beta = p_i (<E> - E_i) in the energy eigenbasis
          const double beta = th[0];
          if (!(beta >= 0)) fail(errc::domain_violation, "beta must be >= 0");
          const double emin = eig.eigenvalues.front();
          std::vector<double> p(d);
          double z = 0;
          for (std::size_t i = 0; i < d; ++i) {
            p[i] = std::exp(-beta * (eig.eigenvalues[i] - emin));
            z += p[i];
          }
          double ebar = 0;
          for (std::size_t i = 0; i < d; ++i) {
            p[i] /= z;
            ebar += p[i] * eig.eigenvalues[i];
          }
          ComplexMatrix dr(d, d);
          for (std::size_t a = 0; a < d; ++a)
            for (std::size_t b = 0; b < d; ++b) {
              cplx acc = 0;
              for (std::size_t i = 0; i < d; ++i)
                acc += eig.eigenvectors(a, i) * p[i] * (ebar - eig.eigenvalues[i]) *
                       std::conj(eig.eigenvectors(b, i));
              dr(a, b) = acc;
            }
          return dr;
        });
    return {std::move(fam), {cfg.beta}, {"beta"}};
  }

  if (cfg.family == "heisenberg-xy") {
    out.params.set("family", "heisenberg-xy")
        .set("J", cfg.j_coupling)
        .set("B", cfg.b_field)
        .set("T", cfg.temperature);
    return {heisenberg_xy_family(cfg.j_coupling), {cfg.b_field, cfg.temperature}, {"B", "T"}};
  }

  if (cfg.family == "stencil") {
    if (cfg.state_file.empty() || cfg.plus_files.empty() ||
        cfg.plus_files.size() != cfg.minus_files.size())
      fail(errc::bad_input,
           "stencil family needs --state plus matching --state-plus/--state-minus lists");
    if (!(cfg.stencil_h > 0)) fail(errc::bad_input, "stencil step must be positive");
    const std::size_t n = cfg.plus_files.size();
    const double h = cfg.stencil_h;

    auto center = load_state_json(cfg.state_file);
    out.params.set("family", "stencil").set("h", h);
    out.files.set(cfg.state_file, Json(file_digest(cfg.state_file)));
    std::vector<DensityMatrix> plus, minus;
    for (std::size_t mu = 0; mu < n; ++mu) {
      plus.push_back(load_state_json(cfg.plus_files[mu]));
      minus.push_back(load_state_json(cfg.minus_files[mu]));
      out.files.set(cfg.plus_files[mu], Json(file_digest(cfg.plus_files[mu])));
      out.files.set(cfg.minus_files[mu], Json(file_digest(cfg.minus_files[mu])));
      if (plus.back().dim() != center.dim() || minus.back().dim() != center.dim())
        fail(errc::dimension_mismatch, "stencil states must share one dimension");
    }

    // The family lives only on the stencil points around theta = 0.
    ParamFamily fam(
        n,
        [center, plus, minus, h, n](const std::vector<double>& th) -> DensityMatrix {
          std::size_t hot = n;  // index of the single nonzero coordinate, if any
          for (std::size_t mu = 0; mu < n; ++mu) {
            if (std::abs(th[mu]) < 1e-12) continue;
            if (hot != n) fail(errc::domain_violation, "stencil family is pointwise");
            hot = mu;
          }
          if (hot == n) return center;
          if (std::abs(th[hot] - h) < 1e-12) return plus[hot];
          if (std::abs(th[hot] + h) < 1e-12) return minus[hot];
          fail(errc::domain_violation, "stencil family is defined only at the stencil points");
        },
        [plus, minus, h](const std::vector<double>&, std::size_t mu) {
          auto d = plus[mu].mat();
          d -= minus[mu].mat();
          d *= 1.0 / (2.0 * h);
          return d;
        });
    fam.set_fd_step(h);
    std::vector<std::string> names;
    for (std::size_t mu = 0; mu < n; ++mu) names.push_back("theta" + std::to_string(mu));
    return {std::move(fam), std::vector<double>(n, 0.0), std::move(names)};
  }

  fail(errc::bad_input, "family must be unitary, thermal, heisenberg-xy, or stencil");
}

QfimReport qfim_by_method(const RunConfig& cfg, const FamilySpec& fs, const DensityMatrix& rho,
                          const std::string& method) {
  if (method == "eigen") return qfim_eigen(fs.fam, fs.theta, cfg.trunc_tol);
  if (method == "vectorized") return qfim_vectorized(rho, fs.fam.derivatives(fs.theta));
  if (method == "vectorized-regularized")
    return qfim_vectorized_regularized(rho, fs.fam.derivatives(fs.theta));
  if (method == "xstate") return qfim_xstate(fs.fam, fs.theta, cfg.trunc_tol);
  if (method == "bloch") {
    if (rho.dim() != 2)
      fail(errc::bad_input, "the bloch method is wired for qubit states only");
    auto rep = qfim_eigen(fs.fam, fs.theta, cfg.trunc_tol);  // SLD-side quantities
    const auto bloch = state_to_bloch(rho);
    const auto drhos = fs.fam.derivatives(fs.theta);
    const auto sigma = su_generators(2);
    std::vector<std::vector<double>> dr(drhos.size(), std::vector<double>(3));
    for (std::size_t mu = 0; mu < drhos.size(); ++mu)
      for (std::size_t i = 0; i < 3; ++i)
        dr[mu][i] = mat_mul(drhos[mu], sigma[i]).trace().real();
    rep.fim = qfim_bloch_qubit(bloch.r, dr);
    rep.crb = sym_inverse(rep.fim, &rep.crb_pseudo_inverse);
    rep.quantumness = 0.0;
    rep.quantumness_clamped = false;
    if (rep.fim.rows() >= 2 && !rep.crb_pseudo_inverse) {
      const auto q = quantumness(rep.fim, rep.uhlmann);
      rep.quantumness = q.value;
      rep.quantumness_clamped = q.clamped;
    }
    rep.method = "bloch";
    return rep;
  }
  fail(errc::bad_input, "unknown method " + method);
}

std::string resolve_method(const RunConfig& cfg, const DensityMatrix& rho) {
  if (cfg.method != "auto") return cfg.method;
  const auto eig = hermitian_eigen(rho.mat());
  const bool full_rank = eig.eigenvalues.front() > 1e-10 * rho.mat().trace().real();
  return full_rank ? "vectorized" : "vectorized-regularized";
}

double cross_check_deviation(const RunConfig& cfg, const FamilySpec& fs,
                             const DensityMatrix& rho, const QfimReport& rep) {
  // Verify against the eigen route, or against the Liouville route when the
  // primary method already is eigen.
  std::string other_method = "eigen";
  if (rep.method == "eigen") {
    RunConfig alt = cfg;
    alt.method = "auto";
    other_method = resolve_method(alt, rho);
  }
  const QfimReport other = qfim_by_method(cfg, fs, rho, other_method);
  double dev = 0, scale = 1.0;
  for (std::size_t i = 0; i < rep.fim.rows(); ++i)
    for (std::size_t j2 = 0; j2 < rep.fim.cols(); ++j2) {
      dev = std::max(dev, std::abs(rep.fim(i, j2) - other.fim(i, j2)));
      scale = std::max(scale, std::abs(rep.fim(i, j2)));
    }
  if (dev > 1e-6 * scale)
    fail(errc::convergence_failure,
         "cross-method check failed: max deviation " + fmt3(dev) + " against " + other.method);
  return dev;
}

void qfim_warnings(const QfimReport& rep, Outcome& out) {
  if (rep.crb_pseudo_inverse)
    out.warnings.push_back("information matrix singular: bound uses the pseudo-inverse");
  if (rep.quantumness_clamped)
    out.warnings.push_back("quantumness clamped to 1 (rounding overshoot)");
}

Outcome compute_qfim(const RunConfig& cfg) {
  Outcome out;
  auto fs = build_family(cfg, out);
  const auto rho = fs.fam.evaluate(fs.theta);
  const auto rep = qfim_by_method(cfg, fs, rho, resolve_method(cfg, rho));
  out.method_used = rep.method;
  qfim_warnings(rep, out);

  const std::size_t n = fs.theta.size();
  Json names = Json::array();
  for (const auto& nm : fs.names) names.push(Json(nm));
  out.result.set("param_names", std::move(names));
  out.result.set("theta", real_vector_json(fs.theta));
  out.result.set("fim", real_matrix_json(rep.fim));
  out.result.set("crb", real_matrix_json(rep.crb));
  out.result.set("crb_diag", real_vector_json(crb_matrix(rep, cfg.n_trials)));
  out.result.set("crb_pseudo_inverse", Json(rep.crb_pseudo_inverse));
  out.result.set("uhlmann", real_matrix_json(rep.uhlmann));
  out.result.set("quantumness", Json(rep.quantumness));
  out.result.set("quantumness_clamped", Json(rep.quantumness_clamped));
  Json slds = Json::array();
  for (const auto& s : rep.slds) slds.push(complex_matrix_json(s.op));
  out.result.set("slds", std::move(slds));
  if (cfg.verify)
    out.result.set("verify_max_deviation", Json(cross_check_deviation(cfg, fs, rho, rep)));

  const auto diag = crb_matrix(rep, cfg.n_trials);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j2 = i; j2 < n; ++j2)
      out.scalars.emplace_back("F_" + fs.names[i] + fs.names[j2], rep.fim(i, j2));
  for (std::size_t i = 0; i < n; ++i)
    out.scalars.emplace_back("var_min_" + fs.names[i], diag[i]);
  out.scalars.emplace_back("quantumness", rep.quantumness);
  return out;
}

Outcome compute_qfi(const RunConfig& cfg) {
  Outcome out;
  auto fs = build_family(cfg, out);
  if (fs.fam.n_params() != 1)
    fail(errc::bad_input, "qfi needs a single-parameter family; use qfim instead");
  const auto rho = fs.fam.evaluate(fs.theta);
  const auto rep = qfim_by_method(cfg, fs, rho, resolve_method(cfg, rho));
  out.method_used = rep.method;
  qfim_warnings(rep, out);

  const double f = rep.fim(0, 0);
  const double bound = cramer_rao_bound(f, cfg.n_trials);
  out.result.set("theta", real_vector_json(fs.theta));
  out.result.set("qfi", Json(f));
  out.result.set("crb", Json(bound));
  out.result.set("sld", complex_matrix_json(rep.slds.front().op));
  out.result.set("support_rank", Json(static_cast<long>(rep.slds.front().support_rank)));
  if (cfg.verify)
    out.result.set("verify_max_deviation", Json(cross_check_deviation(cfg, fs, rho, rep)));

  out.scalars.emplace_back("qfi", f);
  out.scalars.emplace_back("crb", bound);
  return out;
}

// ---- correlations ----

Outcome compute_correlations(const RunConfig& cfg) {
  Outcome out;
  if (cfg.state_file.empty()) fail(errc::bad_input, "correlations needs a --state file");
  std::vector<std::size_t> dims;
  const auto rho = load_state_json(cfg.state_file, &dims);
  out.files.set(cfg.state_file, Json(file_digest(cfg.state_file)));
  if (!cfg.dims.empty()) {
    dims.clear();
    for (long d : cfg.dims) {
      if (d < 1) fail(errc::bad_input, "dims must be positive");
      dims.push_back(static_cast<std::size_t>(d));
    }
  }
  std::size_t prod = 1;
  for (auto d : dims) prod *= d;
  if (prod != rho.dim()) fail(errc::dimension_mismatch, "dims do not factor the state dimension");
  out.params.set("measure", cfg.measure);
  Json jd = Json::array();
  for (auto d : dims) jd.push(Json(static_cast<long>(d)));
  out.params.set("dims", std::move(jd));
  out.method_used = "closed-form";

  auto need_bipartite = [&]() {
    if (dims.size() != 2) fail(errc::bad_input, "this measure needs bipartite dims d1,d2");
  };
  auto emit_report = [&](const CorrelationReport& rep, double normalization) {
    out.result.set("measure", Json(rep.measure));
    out.result.set("value", Json(rep.value));
    out.result.set("max_eigenvalue", Json(rep.max_eigenvalue));
    out.result.set("optimizer_matrix", real_matrix_json(rep.optimizer_matrix));
    if (rep.value == 0.0 && normalization - rep.max_eigenvalue < 0.0)
      out.warnings.push_back("value clamped to 0 (rounding underflow)");
    out.scalars.emplace_back("value", rep.value);
    out.scalars.emplace_back("max_eigenvalue", rep.max_eigenvalue);
  };

  if (cfg.measure == "lqu") {
    need_bipartite();
    emit_report(lqu_qubit(rho, dims[1]), 1.0);
  } else if (cfg.measure == "lqfi") {
    need_bipartite();
    emit_report(lqfi(rho, dims[1]), 1.0);
  } else if (cfg.measure == "lqu-qudit") {
    need_bipartite();
    emit_report(lqu_qudit(rho, dims[0], dims[1]), 2.0 / static_cast<double>(dims[0]));
  } else if (cfg.measure == "lqu-average") {
    std::size_t n = cfg.n_qubits > 0 ? static_cast<std::size_t>(cfg.n_qubits) : dims.size();
    const auto rep = lqu_multiqubit_average(rho, n);
    out.result.set("measure", "lqu-average");
    out.result.set("n_qubits", Json(static_cast<long>(n)));
    out.result.set("per_site", real_vector_json(rep.per_site));
    out.result.set("average", Json(rep.average));
    out.scalars.emplace_back("average", rep.average);
  } else if (cfg.measure == "chain") {
    need_bipartite();
    const auto rep = precision_chain(rho, dims[1]);
    out.result.set("measure", "chain");
    out.result.set("lqu", Json(rep.lqu));
    out.result.set("lqfi", Json(rep.lqfi));
    out.result.set("bound_lqu", Json(rep.bound_lqu));
    out.result.set("bound_lqfi", Json(rep.bound_lqfi));
    out.result.set("zero_correlation", Json(rep.zero_correlation));
    if (rep.zero_correlation)
      out.warnings.push_back("correlations vanish: variance bounds are unbounded");
    out.scalars.emplace_back("lqu", rep.lqu);
    out.scalars.emplace_back("lqfi", rep.lqfi);
    out.scalars.emplace_back("bound_lqu", rep.bound_lqu);
    out.scalars.emplace_back("bound_lqfi", rep.bound_lqfi);
  } else {
    fail(errc::bad_input, "measure must be lqu, lqfi, lqu-qudit, lqu-average, or chain");
  }
  return out;
}

Outcome dispatch_compute(const RunConfig& cfg) {
  if (cfg.command == "classical-fim") return compute_classical(cfg);
  if (cfg.command == "qfi") return compute_qfi(cfg);
  if (cfg.command == "qfim") return compute_qfim(cfg);
  if (cfg.command == "correlations") return compute_correlations(cfg);
  fail(errc::bad_input, "unknown command " + cfg.command);
}

// ---- report assembly ----

Json config_echo(const RunConfig& cfg) {
  Json c = Json::object();
  c.set("method", cfg.method);
  c.set("fd_step", cfg.fd_step);
  c.set("trunc_tol", cfg.trunc_tol);
  c.set("output", cfg.output);
  c.set("n_trials", Json(cfg.n_trials));
  return c;
}

void print_csv_row(const std::vector<std::pair<std::string, double>>& scalars) {
  std::string header, row;
  for (std::size_t i = 0; i < scalars.size(); ++i) {
    if (i) {
      header += ',';
      row += ',';
    }
    header += scalars[i].first;
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", scalars[i].second);
    row += buf;
  }
  std::cout << header << '\n' << row << '\n';
}

void emit(const RunConfig& cfg, const Outcome& out) {
  if (cfg.output == "csv") {
    for (const auto& w : out.warnings) std::cerr << "warning: " << w << '\n';
    print_csv_row(out.scalars);
    return;
  }
  Json rep = Json::object();
  rep.set("tool", "qestkit");
  rep.set("version", "0.1.0");
  rep.set("command", cfg.command);
  if (!cfg.no_timestamp) rep.set("timestamp", iso8601_utc_now());
  rep.set("config", config_echo(cfg));
  Json inputs = Json::object();
  inputs.set("params", out.params);
  inputs.set("files", out.files);
  rep.set("inputs", std::move(inputs));
  rep.set("method", out.method_used);
  rep.set("result", out.result);
  Json warn = Json::array();
  for (const auto& w : out.warnings) warn.push(Json(w));
  rep.set("warnings", std::move(warn));
  std::cout << rep.dump() << '\n';
}

// ---- sweep ----

void apply_param(RunConfig& cfg, const std::string& name, double v) {
  if (name == "mu") cfg.mu = v;
  else if (name == "sigma2") cfg.sigma2 = v;
  else if (name == "theta") cfg.theta = v;
  else if (name == "beta") cfg.beta = v;
  else if (name == "J") cfg.j_coupling = v;
  else if (name == "B") cfg.b_field = v;
  else if (name == "T") cfg.temperature = v;
  else fail(errc::bad_input, "unknown sweep parameter " + name);
}

struct SweepRow {
  double at = 0;
  std::vector<std::pair<std::string, double>> scalars;
  std::string error;
  int code = 0;
};

int run_sweep(const RunConfig& cfg) {
  if (cfg.sweep_points < 1) fail(errc::bad_input, "sweep needs at least one point");
  if (cfg.sweep_over.empty()) fail(errc::bad_input, "sweep needs --over <param>");
  static const char* sweepable[] = {"classical-fim", "qfi", "qfim"};
  if (std::find_if(std::begin(sweepable), std::end(sweepable), [&](const char* c) {
        return cfg.sweep_command == c;
      }) == std::end(sweepable))
    fail(errc::bad_input, "sweep drives classical-fim, qfi, or qfim");
  {
    RunConfig probe = cfg;
    apply_param(probe, cfg.sweep_over, cfg.sweep_from);  // reject bad names up front
  }

  const long npts = cfg.sweep_points;
  std::vector<SweepRow> rows(npts);
#pragma omp parallel for schedule(dynamic) if (npts > 1)
  for (long k = 0; k < npts; ++k) {
    const double v = npts == 1 ? cfg.sweep_from
                               : cfg.sweep_from + (cfg.sweep_to - cfg.sweep_from) *
                                     static_cast<double>(k) / static_cast<double>(npts - 1);
    rows[k].at = v;
    RunConfig point = cfg;
    point.command = cfg.sweep_command;
    try {
      apply_param(point, cfg.sweep_over, v);
      rows[k].scalars = dispatch_compute(point).scalars;
    } catch (const Error& e) {
      rows[k].error = e.what();
      rows[k].code = exit_code_for(e.code());
    } catch (const std::exception& e) {
      rows[k].error = e.what();
      rows[k].code = 3;
    }
  }

  long failures = 0;
  int first_code = 0;
  const SweepRow* shape = nullptr;
  for (const auto& r : rows) {
    if (!r.error.empty()) {
      ++failures;
      if (!first_code) first_code = r.code;
    } else if (!shape) {
      shape = &r;
    }
  }
  if (!shape) {
    std::cerr << "error: every grid point failed; first: " << rows.front().error << '\n';
    return first_code ? first_code : 3;
  }

  if (cfg.output == "csv") {
    std::string header = cfg.sweep_over;
    for (const auto& [name, _] : shape->scalars) header += "," + name;
    header += ",error";
    std::cout << header << '\n';
    for (const auto& r : rows) {
      char buf[40];
      std::snprintf(buf, sizeof buf, "%.17g", r.at);
      std::string line = buf;
      if (r.error.empty()) {
        for (const auto& [_, val] : r.scalars) {
          std::snprintf(buf, sizeof buf, "%.17g", val);
          line += std::string(",") + buf;
        }
        line += ",";
      } else {
        for (std::size_t i = 0; i < shape->scalars.size(); ++i) line += ",";
        std::string msg = r.error;
        for (auto& ch : msg)
          if (ch == ',' || ch == '\n') ch = ';';
        line += "," + msg;
      }
      std::cout << line << '\n';
    }
  } else {
    Json rep = Json::object();
    rep.set("tool", "qestkit");
    rep.set("version", "0.1.0");
    rep.set("command", "sweep");
    if (!cfg.no_timestamp) rep.set("timestamp", iso8601_utc_now());
    Json conf = config_echo(cfg);
    conf.set("sweep_command", cfg.sweep_command);
    conf.set("over", cfg.sweep_over);
    conf.set("from", cfg.sweep_from);
    conf.set("to", cfg.sweep_to);
    conf.set("points", Json(cfg.sweep_points));
    rep.set("config", std::move(conf));
    Json jrows = Json::array();
    for (const auto& r : rows) {
      Json row = Json::object();
      row.set(cfg.sweep_over, Json(r.at));
      if (r.error.empty()) {
        for (const auto& [name, val] : r.scalars) row.set(name, Json(val));
      } else {
        row.set("error", Json(r.error));
      }
      jrows.push(std::move(row));
    }
    rep.set("rows", std::move(jrows));
    Json warn = Json::array();
    if (failures)
      warn.push(Json(std::to_string(failures) + " of " + std::to_string(npts) +
                     " grid points failed"));
    rep.set("warnings", std::move(warn));
    std::cout << rep.dump() << '\n';
  }

  if (failures) {
    std::cerr << "warning: " << failures << " of " << npts << " grid points failed\n";
    if (cfg.strict) return first_code;
  }
  return 0;
}

}  // namespace

int run(const RunConfig& cfg) {
  try {
    validate_common(cfg);
    if (cfg.command == "sweep") return run_sweep(cfg);
    const Outcome out = dispatch_compute(cfg);
    emit(cfg, out);
    return 0;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
}

}  // namespace qestkit::tool
