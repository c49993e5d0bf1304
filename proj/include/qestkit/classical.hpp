#pragma once

#include <cstddef>
#include <functional>
#include <utility>
#include <vector>

#include "qestkit/complex_matrix.hpp"
#include "qestkit/states.hpp"

namespace qestkit {

// Classical statistical model. Discrete models enumerate outcomes 0..n-1;
// continuous models integrate the density over [a(theta), b(theta)] with
// fixed-order Gauss-Legendre quadrature.
struct ProbModel {
  enum class Kind { discrete, continuous };
  Kind kind = Kind::discrete;
  std::size_t n_params = 1;
  std::size_t n_outcomes = 0;  // discrete only
  std::function<std::pair<double, double>(const std::vector<double>&)> interval;  // continuous only
  std::size_t quad_order = 200;
  // x is the outcome index (discrete) or the sample point (continuous)
  std::function<double(double x, const std::vector<double>& theta)> prob;
  // optional analytic d log p / d theta_mu
  std::function<double(double x, const std::vector<double>& theta, std::size_t mu)> score_analytic;
  double fd_step = 1e-5;  // scaled by max(1, |theta_mu|)
};

struct CfimReport {
  RealMatrix fim;
  RealMatrix crb;  // inverse, or pseudo-inverse when flagged
  bool crb_pseudo_inverse = false;
  long n_trials = 1;
  double regularity_residual = 0.0;  // max_mu |E[d log p / d theta_mu]|
};

// d log p(x; theta) / d theta_mu
double score(const ProbModel& model, double x, const std::vector<double>& theta, std::size_t mu);

// Variance of the score, E[(d log p)^2]. Throws RegularityViolation when
// |E[score]| exceeds 1e-6.
double fisher_information(const ProbModel& model, const std::vector<double>& theta, std::size_t mu);

// Full matrix E[s_mu s_nu]. The regularity residual is attached to the report
// and only residuals beyond 1e-3 (a model inconsistency, not quadrature noise)
// throw; callers surface residuals above 1e-6 as warnings.
CfimReport fisher_matrix(const ProbModel& model, const std::vector<double>& theta);

double cramer_rao_bound(double fi, long n_trials);

// p(x; theta) = Tr(rho_theta Pi_x). POVM elements must be PSD and sum to the
// identity within 1e-10.
ProbModel born_model(const ParamFamily& fam, const std::vector<ComplexMatrix>& povm);

// N(mu, sigma^2) over theta = (mu, sigma^2); quadrature interval mu +- 12 sigma.
ProbModel normal_model();

// Two-outcome projective qubit model over theta in [0, pi]; Fisher information
// is the constant 1/4.
ProbModel qubit_pvm_prob_model();

// Gauss-Legendre nodes and weights on [-1, 1]; cached per order.
const std::pair<std::vector<double>, std::vector<double>>& gauss_legendre(std::size_t order);

}  // namespace qestkit
