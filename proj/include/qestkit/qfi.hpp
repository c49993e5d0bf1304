#pragma once

#include <cstddef>
#include <vector>

#include "qestkit/complex_matrix.hpp"
#include "qestkit/states.hpp"

namespace qestkit {

// Symmetric logarithmic derivative: d rho = (L rho + rho L)/2 on the support
// of rho, zero on the kernel-kernel block (minimal-norm solution).
struct Sld {
  ComplexMatrix op;
  std::size_t param_index = 0;
  double truncation_tol = 1e-12;
  std::size_t support_rank = 0;
};

// L_ij = 2 <i|drho|j> / (lambda_i + lambda_j) for lambda_i + lambda_j >
// tol * Tr(rho), else 0.
Sld sld_eigenbasis(const DensityMatrix& rho, const ComplexMatrix& drho, double tol = 1e-12,
                   std::size_t param_index = 0);

// Tr(L^2 rho) with the truncated SLD, equivalently the truncated double sum
// 2|<i|drho|j>|^2/(lambda_i+lambda_j).
double qfi(const DensityMatrix& rho, const ComplexMatrix& drho, double tol = 1e-12);
double qfi(const ParamFamily& fam, const std::vector<double>& theta, double tol = 1e-12);

// 4(<dpsi|dpsi> - |<psi|dpsi>|^2)
double qfi_pure(const std::vector<cplx>& psi, const std::vector<cplx>& dpsi);

// Eigenvalue/eigenvector split of the single-parameter information:
//   classical_part = sum (d p_i)^2 / p_i
//   quantum_part   = 4 sum p_i <dpsi_i|dpsi_i> - 8 sum_{i!=j} p_i p_j/(p_i+p_j) |<psi_i|dpsi_j>|^2
// using gauge-zero perturbative eigenvector derivatives. Requires a
// non-degenerate spectrum (gap > 1e-8 * Tr), else DegenerateSpectrum.
struct SpectralQfi {
  double classical_part = 0.0;
  double quantum_part = 0.0;
  double total = 0.0;
};
SpectralQfi qfi_spectral(const ParamFamily& fam, const std::vector<double>& theta,
                         std::size_t mu = 0);
SpectralQfi qfi_spectral(const DensityMatrix& rho, const ComplexMatrix& drho);

// Eigenprojectors of the SLD, degenerate eigenvalues grouped; measuring them
// saturates the quantum bound: CFI(born_model) = QFI at the same theta.
std::vector<ComplexMatrix> optimal_measurement(const Sld& sld);

// Test oracle: L = 2 int_0^inf exp(-rho t) drho exp(-rho t) dt by quadrature
// in the eigenbasis. Production code uses sld_eigenbasis.
ComplexMatrix sld_integral_oracle(const DensityMatrix& rho, const ComplexMatrix& drho,
                                  double tol = 1e-12);

}  // namespace qestkit
