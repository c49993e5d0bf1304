#pragma once

#include <array>
#include <cstddef>
#include <string>
#include <vector>

#include "qestkit/complex_matrix.hpp"
#include "qestkit/qfi.hpp"
#include "qestkit/states.hpp"

namespace qestkit {

struct QfimReport {
  RealMatrix fim;         // symmetric PSD, units theta^-2
  std::vector<Sld> slds;  // one per parameter
  RealMatrix crb;         // inverse of fim, or pseudo-inverse when flagged
  bool crb_pseudo_inverse = false;
  RealMatrix uhlmann;     // antisymmetric; zero for n = 1
  double quantumness = 0.0;
  bool quantumness_clamped = false;
  std::string method;     // eigen | bloch | vectorized | vectorized-regularized | xstate
  double trunc_tol = 1e-12;
};

// F_{mu nu} = sum_{li+lj > tol Tr} 2 Re(<i|d_mu rho|j><j|d_nu rho|i>)/(li+lj)
QfimReport qfim_eigen(const DensityMatrix& rho, const std::vector<ComplexMatrix>& drhos,
                      double tol = 1e-12);
QfimReport qfim_eigen(const ParamFamily& fam, const std::vector<double>& theta,
                      double tol = 1e-12);

// Qubit Bloch form: F = dr.dr + (r.dr)(r.dr)/(1-|r|^2); pure branch drops the
// second term when |r| = 1 within 1e-10. |r| > 1 is BlochNormExceeded.
RealMatrix qfim_bloch_qubit(const std::vector<double>& r,
                            const std::vector<std::vector<double>>& dr);

// General-d Bloch contraction, kept in the uninverted form
//   F = (dr_nu)^T (d/(2(d-1)) G - r r^T) dr_mu,
//   G_ij = (2/d) delta_ij + sqrt((d-1)/(2d)) sum_m v_ijm r_m,
// with v the symmetric structure constants of su_generators(d). For d > 2 this
// disagrees with qfim_eigen except on special families; measure_bloch_general_gap
// reports the discrepancy instead of repairing the formula. The qubit path is
// qfim_bloch_qubit.
RealMatrix qfim_bloch_general(const std::vector<double>& r,
                              const std::vector<std::vector<double>>& dr, std::size_t d);

// Liouville-space route, full rank only: F_{mu nu} = 2 Re vec[d_mu rho]^dag
// M^-1 vec[d_nu rho] and vec[L] = 2 M^-1 vec[d rho]. The conjugation placement
// inside M (conj(rho) x I + I x rho vs rho x I + I x conj(rho)) is picked once
// at startup by a self-test against qfim_eigen.
QfimReport qfim_vectorized(const DensityMatrix& rho, const std::vector<ComplexMatrix>& drhos);

// Rank-deficient route: evaluate the vectorized formula on
// rho_s = (1-s) rho + (s/d) I with d rho_s = (1-s) d rho over the schedule and
// Richardson-extrapolate linearly to s = 0; the third point monitors the
// residual (non-shrinking residuals are ExtrapolationUnstable).
QfimReport qfim_vectorized_regularized(const DensityMatrix& rho,
                                       const std::vector<ComplexMatrix>& drhos,
                                       std::array<double, 3> s_schedule = {1e-4, 5e-5, 2.5e-5});

// Two-qubit X-pattern route: both 2x2 blocks (outer {0,3}, inner {1,2})
// contribute eigenvalue, pure-rotation, and mixing terms; degenerate blocks
// fall back to the truncated spectral sum on the block. The X pattern must
// hold at theta and theta +- h.
QfimReport qfim_xstate(const ParamFamily& fam, const std::vector<double>& theta,
                       double tol = 1e-12);

// U_{mu nu} = -(i/4) Tr(rho [L_mu, L_nu]); real antisymmetric.
RealMatrix uhlmann_matrix(const DensityMatrix& rho, const std::vector<Sld>& slds);

// R = spectral radius of 2i F^-1 U, evaluated as the largest |eigenvalue| of
// the Hermitian matrix 2i F^-1/2 U F^-1/2. Values in (1, 1+1e-6] clamp to 1;
// beyond that is RangeViolation. For n = 2 the identity sqrt(det 2U / det F)
// is asserted within 1e-8.
struct QuantumnessResult {
  double value = 0.0;
  bool clamped = false;
  bool pseudo_inverse = false;
};
QuantumnessResult quantumness(const RealMatrix& fim, const RealMatrix& uhlmann);

// Per-parameter variance lower bounds [F^-1]_{mu mu} / n_trials.
std::vector<double> crb_matrix(const QfimReport& report, long n_trials);

// Closed-form two-spin XY thermal oracle over theta = (B, T). Entries follow
// the analytical worked example; the F_BT sign and the last diagonal
// Gamma-block entry are fixed by the exact inverse and 2x2-determinant
// identities (the raw source prints their mirror images), cross-checked
// against the spectral method on a (J,B,T) grid.
struct HeisenbergOracle {
  double j = 0, b = 0, t = 0;
  // thermal-state scalars and their parameter derivatives
  double chi = 0, pi = 0, gam = 0, sig = 0;
  double dchi_db = 0, dpi_db = 0, dgam_db = 0, dsig_db = 0;
  double dchi_dt = 0, dpi_dt = 0, dgam_dt = 0, dsig_dt = 0;
  // Gamma-block entries (alpha..varpi) plus the mirrored alpha_bar
  double alpha = 0, xi = 0, delta = 0, lam = 0, tau = 0;
  double kappa = 0, eta = 0, vartheta = 0, mu = 0, varpi = 0;
  double alpha_bar = 0;
  double f_tt = 0, f_bb = 0, f_bt = 0;
  double var_min_t = 0, var_min_b = 0;
  ComplexMatrix sld_b, sld_t;  // closed-form 4x4 SLDs

  RealMatrix fim() const;          // [[F_BB, F_BT], [F_BT, F_TT]]
  ComplexMatrix gamma_block() const;  // 16x16 inverse of the Liouville superoperator
};
HeisenbergOracle heisenberg_oracle(double j, double b, double t);

// Max |F_bloch_general - F_eigen| entry for a family, surfacing the measured
// gap of the uninverted contraction.
double measure_bloch_general_gap(const ParamFamily& fam, const std::vector<double>& theta);

}  // namespace qestkit
