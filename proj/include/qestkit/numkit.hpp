#pragma once

#include <cstddef>
#include <vector>

#include "qestkit/complex_matrix.hpp"

namespace qestkit {

struct HermitianEigen {
  std::vector<double> eigenvalues;  // ascending
  ComplexMatrix eigenvectors;       // columns, orthonormal
};

// Eigendecomposition of a Hermitian matrix. The input is symmetrized
// internally; asymmetry beyond 1e-10 * norm_inf is rejected. Eigenvector
// gauge under degeneracy is unspecified, so downstream formulas must be
// gauge-invariant.
HermitianEigen hermitian_eigen(const ComplexMatrix& m);

// V diag(sqrt(max(lambda,0))) V^dag. Eigenvalues below -clip are an error;
// clip < 0 selects the default 1e-10 * Tr(m).
ComplexMatrix matrix_sqrt_psd(const ComplexMatrix& m, double clip = -1.0);

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b);

// Column stacking: vec([[a,b],[c,d]]) = (a, c, b, d).
std::vector<cplx> vec(const ComplexMatrix& a);
ComplexMatrix unvec(const std::vector<cplx>& v, std::size_t d);

ComplexMatrix partial_trace(const ComplexMatrix& m, const std::vector<std::size_t>& dims,
                            const std::vector<std::size_t>& keep);

// Generalized Gell-Mann set: traceless Hermitian with Tr(K_i K_j) = 2 delta_ij.
// Order: symmetric pairs, antisymmetric pairs, diagonals. d=2 gives
// (sigma_x, sigma_y, sigma_z) exactly.
std::vector<ComplexMatrix> su_generators(std::size_t d);

ComplexMatrix embed_local(const ComplexMatrix& op, const std::vector<std::size_t>& dims,
                          std::size_t position);

ComplexMatrix mat_mul(const ComplexMatrix& a, const ComplexMatrix& b);

// Solve A x = b for Hermitian positive definite A (Liouville-space solves).
std::vector<cplx> solve_hpd(const ComplexMatrix& a, const std::vector<cplx>& b);

// Dense real symmetric eigensolve / linear algebra for the small information
// matrices (n <= a few dozen).
struct RealSymEigen {
  std::vector<double> eigenvalues;  // ascending
  RealMatrix eigenvectors;          // columns
};
RealSymEigen real_sym_eigen(const RealMatrix& m);
RealMatrix real_mul(const RealMatrix& a, const RealMatrix& b);
// Inverse of a symmetric matrix; falls back to the Moore-Penrose
// pseudo-inverse when the smallest |eigenvalue| is below rank_tol * max
// |eigenvalue|, reporting which branch ran through *used_pseudo.
RealMatrix sym_inverse(const RealMatrix& m, bool* used_pseudo, double rank_tol = 1e-12);
double sym_determinant(const RealMatrix& m);

// Serial reference kernels. The parallel versions above assign each output
// element to exactly one thread with a fixed-order inner sum, so results are
// bitwise identical to these.
namespace ref {
ComplexMatrix mat_mul(const ComplexMatrix& a, const ComplexMatrix& b);
ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b);
ComplexMatrix partial_trace(const ComplexMatrix& m, const std::vector<std::size_t>& dims,
                            const std::vector<std::size_t>& keep);
}  // namespace ref

}  // namespace qestkit
