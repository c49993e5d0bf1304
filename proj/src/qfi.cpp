#include "qestkit/qfi.hpp"

#include <cmath>

#include "qestkit/classical.hpp"
#include "qestkit/numkit.hpp"

namespace qestkit {

namespace {

// Matrix elements of drho in the eigenbasis of rho: D_ij = <i|drho|j>.
ComplexMatrix to_eigenbasis(const HermitianEigen& eig, const ComplexMatrix& drho) {
  return mat_mul(mat_mul(eig.eigenvectors.dagger(), drho), eig.eigenvectors);
}

}  // namespace

Sld sld_eigenbasis(const DensityMatrix& rho, const ComplexMatrix& drho, double trunc_tol,
                   std::size_t param_index) {
  const std::size_t d = rho.dim();
  if (drho.rows() != d || drho.cols() != d)
    fail(errc::dimension_mismatch, "derivative shape does not match the state");
  const auto eig = hermitian_eigen(rho.mat());
  const auto D = to_eigenbasis(eig, drho);
  const double cutoff = trunc_tol * rho.mat().trace().real();

  ComplexMatrix L_eig(d, d);
  std::size_t rank = 0;
  for (std::size_t i = 0; i < d; ++i)
    if (eig.eigenvalues[i] > cutoff) ++rank;
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < d; ++j) {
      const double denom = eig.eigenvalues[i] + eig.eigenvalues[j];
      if (denom <= cutoff) continue;  // kernel-kernel block: minimal-norm choice is zero
      L_eig(i, j) = 2.0 * D(i, j) / denom;
    }
  Sld out;
  out.op = mat_mul(mat_mul(eig.eigenvectors, L_eig), eig.eigenvectors.dagger());
  out.param_index = param_index;
  out.truncation_tol = trunc_tol;
  out.support_rank = rank;
  return out;
}

double qfi(const DensityMatrix& rho, const ComplexMatrix& drho, double trunc_tol) {
  const std::size_t d = rho.dim();
  if (drho.rows() != d || drho.cols() != d)
    fail(errc::dimension_mismatch, "derivative shape does not match the state");
  const auto eig = hermitian_eigen(rho.mat());
  const auto D = to_eigenbasis(eig, drho);
  const double cutoff = trunc_tol * rho.mat().trace().real();
  double f = 0;
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < d; ++j) {
      const double denom = eig.eigenvalues[i] + eig.eigenvalues[j];
      if (denom <= cutoff) continue;
      f += 2.0 * std::norm(D(i, j)) / denom;
    }
  return f;
}

double qfi(const ParamFamily& fam, const std::vector<double>& theta, double trunc_tol) {
  if (fam.n_params() != 1) fail(errc::dimension_mismatch, "single-parameter family required");
  return qfi(fam.evaluate(theta), fam.derivative(theta, 0), trunc_tol);
}

double qfi_pure(const std::vector<cplx>& psi, const std::vector<cplx>& dpsi) {
  if (psi.size() != dpsi.size() || psi.empty())
    fail(errc::dimension_mismatch, "state and derivative lengths differ");
  double n2 = 0;
  for (const auto& c : psi) n2 += std::norm(c);
  if (std::abs(std::sqrt(n2) - 1.0) > 1e-10)
    fail(errc::not_normalized, "pure state is not normalized");
  double dd = 0;
  cplx pd = 0;
  for (std::size_t i = 0; i < psi.size(); ++i) {
    dd += std::norm(dpsi[i]);
    pd += std::conj(psi[i]) * dpsi[i];
  }
  return 4.0 * (dd - std::norm(pd));
}

SpectralQfi qfi_spectral(const DensityMatrix& rho, const ComplexMatrix& drho) {
  const std::size_t d = rho.dim();
  if (drho.rows() != d || drho.cols() != d)
    fail(errc::dimension_mismatch, "derivative shape does not match the state");
  const auto eig = hermitian_eigen(rho.mat());
  const double tr = rho.mat().trace().real();
  for (std::size_t i = 0; i + 1 < d; ++i)
    if (eig.eigenvalues[i + 1] - eig.eigenvalues[i] < 1e-8 * tr)
      fail(errc::degenerate_spectrum,
           "spectral split needs nondegenerate eigenvalues; gap below 1e-8");
  const auto D = to_eigenbasis(eig, drho);

  SpectralQfi out;
  // Populations move by the diagonal of drho in the rho eigenbasis.
  for (std::size_t i = 0; i < d; ++i) {
    const double p = eig.eigenvalues[i];
    const double dp = D(i, i).real();
    if (p > 1e-12) out.classical_part += dp * dp / p;
  }
  // Basis rotation: first-order eigenvector change |di> = sum_{j!=i} D_ji/(p_i-p_j) |j>.
  double rot = 0, cross = 0;
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < d; ++j) {
      if (i == j) continue;
      const double gap = eig.eigenvalues[i] - eig.eigenvalues[j];
      const double w = std::norm(D(i, j)) / (gap * gap);
      rot += 4.0 * eig.eigenvalues[i] * w;
      const double denom = eig.eigenvalues[i] + eig.eigenvalues[j];
      if (denom > 1e-12 * tr)
        cross += 8.0 * eig.eigenvalues[i] * eig.eigenvalues[j] / denom * w;
    }
  out.quantum_part = rot - cross;
  out.total = out.classical_part + out.quantum_part;
  return out;
}

SpectralQfi qfi_spectral(const ParamFamily& fam, const std::vector<double>& theta,
                         std::size_t mu) {
  return qfi_spectral(fam.evaluate(theta), fam.derivative(theta, mu));
}

std::vector<ComplexMatrix> optimal_measurement(const Sld& sld) {
  const auto eig = hermitian_eigen(sld.op);
  const std::size_t d = sld.op.rows();
  const double scale = std::max(1.0, sld.op.norm_inf());

  // Group repeated eigenvalues so each projector spans a full eigenspace.
  std::vector<ComplexMatrix> povm;
  std::size_t start = 0;
  while (start < d) {
    std::size_t stop = start + 1;
    while (stop < d && eig.eigenvalues[stop] - eig.eigenvalues[stop - 1] < 1e-8 * scale) ++stop;
    ComplexMatrix proj(d, d);
    for (std::size_t k = start; k < stop; ++k)
      for (std::size_t a = 0; a < d; ++a)
        for (std::size_t b = 0; b < d; ++b)
          proj(a, b) += eig.eigenvectors(a, k) * std::conj(eig.eigenvectors(b, k));
    povm.push_back(std::move(proj));
    start = stop;
  }
  return povm;
}

ComplexMatrix sld_integral_oracle(const DensityMatrix& rho, const ComplexMatrix& drho,
                                  double trunc_tol) {
  // 2 * integral_0^inf exp(-rho t) drho exp(-rho t) dt, evaluated in the eigenbasis
  // where the integral is elementwise: L_ij = 2 D_ij / (p_i + p_j). Computing it by
  // quadrature keeps the route independent of the closed-form division above.
  const auto eig = hermitian_eigen(rho.mat());
  const auto D = to_eigenbasis(eig, drho);
  const std::size_t d = rho.dim();
  const double cutoff = trunc_tol * rho.mat().trace().real();

  // Substitute t = u/(1-u) to map [0,inf) onto [0,1); 400 nodes is plenty for
  // the exponential decay rates that survive the truncation cut.
  const auto& [nodes, weights] = gauss_legendre(400);
  ComplexMatrix L_eig(d, d);
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < d; ++j) {
      const double denom = eig.eigenvalues[i] + eig.eigenvalues[j];
      if (denom <= cutoff) continue;
      double val = 0;
      for (std::size_t k = 0; k < nodes.size(); ++k) {
        const double u = 0.5 * (nodes[k] + 1.0);
        const double w = 0.5 * weights[k];
        const double t = u / (1.0 - u);
        const double jac = 1.0 / ((1.0 - u) * (1.0 - u));
        val += w * jac * std::exp(-denom * t);
      }
      L_eig(i, j) = 2.0 * val * D(i, j);
    }
  return mat_mul(mat_mul(eig.eigenvectors, L_eig), eig.eigenvectors.dagger());
}

}  // namespace qestkit
