#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "qestkit/complex_matrix.hpp"

namespace qestkit {

// Validated density matrix: Hermitian within 1e-10 * norm_inf, unit trace
// within 1e-10, eigenvalues >= -psd_tolerance.
class DensityMatrix {
 public:
  explicit DensityMatrix(ComplexMatrix mat, double psd_tolerance = 1e-10);

  const ComplexMatrix& mat() const noexcept { return mat_; }
  std::size_t dim() const noexcept { return mat_.rows(); }
  double psd_tolerance() const noexcept { return psd_tol_; }

 private:
  ComplexMatrix mat_;
  double psd_tol_;
};

struct BlochVector {
  std::vector<double> r;  // length d^2 - 1
  std::size_t d = 2;
};

// Box domain per parameter; unbounded sides are +-infinity.
struct ParamDomain {
  std::vector<double> lo, hi;
  bool contains(const std::vector<double>& theta) const;
};

// Parametrized statistical model theta -> rho_theta. Derivatives come from an
// analytic rule when the builder supplies one, otherwise from central finite
// differences with step fd_step * max(1, |theta_mu|).
class ParamFamily {
 public:
  using EvalFn = std::function<DensityMatrix(const std::vector<double>&)>;
  using DerivFn = std::function<ComplexMatrix(const std::vector<double>&, std::size_t)>;

  ParamFamily(std::size_t n_params, EvalFn eval);
  ParamFamily(std::size_t n_params, EvalFn eval, DerivFn analytic);

  std::size_t n_params() const noexcept { return n_params_; }
  bool has_analytic_derivative() const noexcept { return static_cast<bool>(analytic_); }
  double fd_step() const noexcept { return fd_step_; }
  void set_fd_step(double h) { fd_step_ = h; }
  void set_domain(ParamDomain d) { domain_ = std::move(d); }
  const std::optional<ParamDomain>& domain() const noexcept { return domain_; }

  DensityMatrix evaluate(const std::vector<double>& theta) const;
  // Hermitian and traceless within 2e-8 (validated); analytic mode delegates,
  // finite differences evaluate at theta +- h e_mu.
  ComplexMatrix derivative(const std::vector<double>& theta, std::size_t mu) const;
  std::vector<ComplexMatrix> derivatives(const std::vector<double>& theta) const;

 private:
  std::size_t n_params_;
  EvalFn eval_;
  DerivFn analytic_;
  double fd_step_ = 1e-5;
  std::optional<ParamDomain> domain_;
};

ComplexMatrix family_derivative(const ParamFamily& fam, const std::vector<double>& theta,
                                std::size_t mu);

// exp(-beta H)/Z in the eigenbasis of H, exponents shifted so the largest is 0.
DensityMatrix thermal_state(const ComplexMatrix& h, double beta);

// theta -> e^{-i theta H} rho0 e^{+i theta H} with analytic derivative -i[H, rho].
ParamFamily unitary_family(const DensityMatrix& rho0, const ComplexMatrix& h);

// rho = (1/d)(I + sqrt(d(d-1)/2) r.K) over su_generators(d); d=2 reduces to
// (I + r.sigma)/2.
DensityMatrix bloch_to_state(const BlochVector& b);
BlochVector state_to_bloch(const DensityMatrix& rho);

// Two-spin XY exchange with a transverse field:
//   H = 2J(Sx Sx + Sy Sy) + B(Sz1 + Sz2), S = sigma/2.
ComplexMatrix heisenberg_xy_hamiltonian(double j, double b);

// Closed-form thermal family over theta = (B, T), k_B = 1, with analytic
// derivatives of the four scalar entries. Domain requires T > 0.
ParamFamily heisenberg_xy_family(double j);

// Projective qubit measurement model: p(+-; theta) = (1 +- cos(theta/2))/2.
std::pair<double, double> qubit_pvm_model(double theta);

// JSON state/operator files: {"dims":[d1,...],"matrix":[[[re,im],...],...]} row-major.
ComplexMatrix load_matrix_json(const std::string& path, std::vector<std::size_t>* dims_out = nullptr);
DensityMatrix load_state_json(const std::string& path, std::vector<std::size_t>* dims_out = nullptr);

}  // namespace qestkit
