#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "qestkit/complex_matrix.hpp"
#include "qestkit/states.hpp"

namespace qestkit {

// Wigner-Yanase skew information Tr(rho K^2) - Tr(sqrt(rho) K sqrt(rho) K),
// clamped at 0 against rounding.
double skew_information(const DensityMatrix& rho, const ComplexMatrix& k);

double variance_observable(const DensityMatrix& rho, const ComplexMatrix& k);

// Quarter-convention information of the rotation family generated by K:
// Tr(rho K^2) - sum_{m,n} 2 p_m p_n/(p_m+p_n) |<m|K|n>|^2, all pairs with
// p_m + p_n above the truncation threshold. Equals qfi(rho, -i[K, rho])/4.
double qfi_quarter(const DensityMatrix& rho, const ComplexMatrix& k, double tol = 1e-12);

struct CorrelationReport {
  double value = 0.0;               // normalization - max_eigenvalue, >= 0
  RealMatrix optimizer_matrix;      // M, W, or What
  double max_eigenvalue = 0.0;
  std::string measure;              // lqfi | lqu | lqu_qudit
};

// Minimum quarter-information over K_A = s.sigma x 1 with unit s, in closed
// form 1 - lambda_max(M). The pair sum in M runs over all (i, j) with
// p_i + p_j above threshold, diagonal included; that is the form under which
// the closed result equals the direct minimization (the i != j restriction
// seen in print sends every pure state to 1). M is symmetrized to its real
// part, which leaves s^T M s unchanged.
CorrelationReport lqfi(const DensityMatrix& rho_ab, std::size_t dim_b);

// Minimum skew information over the same observable family, in closed form
// 1 - max eigenvalue of w_ij = Tr(sqrt(rho)(sigma_i x 1) sqrt(rho)(sigma_j x 1)).
CorrelationReport lqu_qubit(const DensityMatrix& rho_ab, std::size_t dim_b);

struct MultiqubitLqu {
  std::vector<double> per_site;
  double average = 0.0;
};
MultiqubitLqu lqu_multiqubit_average(const DensityMatrix& rho, std::size_t n_qubits);

// Qudit side A of dimension d1: What_ij = W_ij - sum_k g_ijk P_k with
// g_ijk = (1/4) Tr({lambda_i, lambda_j} lambda_k) and P_k = Tr(rho lambda_k x 1);
// value = 2/d1 - max eigenvalue. Exact minimum of skew information over
// K_A = s.lambda with unit s (for d1 = 2 the correction vanishes identically
// and this reduces to lqu_qubit).
CorrelationReport lqu_qudit(const DensityMatrix& rho, std::size_t d1, std::size_t d2);

// D_H^2 = 1 - Tr(sqrt(rho) sqrt(sigma))
double hellinger_distance_sq(const DensityMatrix& rho, const DensityMatrix& sigma);

// U <= Q_F <= 2U with the variance upper bounds 1/U and 1/Q_F. Vanishing
// correlations flag zero_correlation and report infinite bounds instead of
// throwing.
struct PrecisionChain {
  double lqu = 0.0;
  double lqfi = 0.0;
  double bound_lqu = 0.0;   // 1/lqu
  double bound_lqfi = 0.0;  // 1/lqfi
  bool zero_correlation = false;
};
PrecisionChain precision_chain(const DensityMatrix& rho_ab, std::size_t dim_b);

}  // namespace qestkit
