#include "qestkit/classical.hpp"

#include <cmath>
#include <map>
#include <mutex>

#include "qestkit/numkit.hpp"

namespace qestkit {

namespace {

constexpr double kProbFloor = 1e-15;     // outcomes below this are skipped
constexpr double kRegularityTol = 1e-6;  // scalar path throws beyond this
constexpr double kRegularityHard = 1e-3; // matrix path throws beyond this

double fd_score(const ProbModel& model, double x, const std::vector<double>& theta,
                std::size_t mu) {
  const double h = model.fd_step * std::max(1.0, std::abs(theta[mu]));
  std::vector<double> tp = theta, tm = theta;
  tp[mu] += h;
  tm[mu] -= h;
  const double pp = model.prob(x, tp), pm = model.prob(x, tm);
  if (pp <= 0 || pm <= 0) fail(errc::zero_probability, "log-derivative hit zero probability");
  return (std::log(pp) - std::log(pm)) / (2.0 * h);
}

// E[f] over the model's outcome space at theta, where f(x, p) sees the mass.
template <typename F>
double expectation(const ProbModel& model, const std::vector<double>& theta, F&& f,
                   double* total_mass) {
  double acc = 0, mass = 0;
  if (model.kind == ProbModel::Kind::discrete) {
    for (std::size_t x = 0; x < model.n_outcomes; ++x) {
      const double p = model.prob(static_cast<double>(x), theta);
      if (p < 0 && p > -1e-12) continue;  // rounding at the boundary
      if (p < 0) fail(errc::quadrature_failure, "negative outcome probability");
      mass += p;
      if (p < kProbFloor) continue;
      acc += p * f(static_cast<double>(x), p);
    }
  } else {
    const auto [a, b] = model.interval(theta);
    const auto& [nodes, weights] = gauss_legendre(model.quad_order);
    const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    for (std::size_t k = 0; k < nodes.size(); ++k) {
      const double x = mid + half * nodes[k];
      const double p = model.prob(x, theta);
      if (p < 0) fail(errc::quadrature_failure, "negative density");
      const double w = half * weights[k];
      mass += w * p;
      if (p < kProbFloor) continue;
      acc += w * p * f(x, p);
    }
  }
  if (total_mass) *total_mass = mass;
  return acc;
}

void check_normalization(double mass) {
  if (std::abs(mass - 1.0) > 1e-8)
    fail(errc::quadrature_failure, "model mass differs from 1 by more than 1e-8");
}

}  // namespace

const std::pair<std::vector<double>, std::vector<double>>& gauss_legendre(std::size_t order) {
  static std::map<std::size_t, std::pair<std::vector<double>, std::vector<double>>> cache;
  static std::mutex mu;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(order);
  if (it != cache.end()) return it->second;

  // Newton iteration on P_n from the Chebyshev initial guess; nodes symmetric.
  std::vector<double> x(order), w(order);
  const std::size_t m = (order + 1) / 2;
  for (std::size_t i = 0; i < m; ++i) {
    double z = std::cos(M_PI * (i + 0.75) / (order + 0.5));
    double pp = 0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = 0.0;
      for (std::size_t k = 0; k < order; ++k) {
        const double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * k + 1.0) * z * p1 - k * p2) / (k + 1.0);
      }
      pp = order * (z * p0 - p1) / (z * z - 1.0);
      const double dz = p0 / pp;
      z -= dz;
      if (std::abs(dz) < 1e-15) break;
    }
    x[i] = -z;
    x[order - 1 - i] = z;
    w[i] = 2.0 / ((1.0 - z * z) * pp * pp);
    w[order - 1 - i] = w[i];
  }
  return cache.emplace(order, std::make_pair(std::move(x), std::move(w))).first->second;
}

double score(const ProbModel& model, double x, const std::vector<double>& theta, std::size_t mu) {
  if (theta.size() != model.n_params || mu >= model.n_params)
    fail(errc::dimension_mismatch, "score index out of range");
  const double p = model.prob(x, theta);
  if (p <= 0) fail(errc::zero_probability, "score undefined at zero probability");
  if (model.score_analytic) return model.score_analytic(x, theta, mu);
  return fd_score(model, x, theta, mu);
}

double fisher_information(const ProbModel& model, const std::vector<double>& theta,
                          std::size_t mu) {
  double mass = 0;
  const double mean_score =
      expectation(model, theta, [&](double x, double) { return score(model, x, theta, mu); },
                  &mass);
  check_normalization(mass);
  if (std::abs(mean_score) > kRegularityTol)
    fail(errc::regularity_violation,
         "mean score " + std::to_string(mean_score) + " exceeds 1e-6");
  return expectation(model, theta,
                     [&](double x, double) {
                       const double s = score(model, x, theta, mu);
                       return s * s;
                     },
                     nullptr);
}

CfimReport fisher_matrix(const ProbModel& model, const std::vector<double>& theta) {
  const std::size_t n = model.n_params;
  CfimReport rep;
  rep.fim = RealMatrix(n, n);
  double residual = 0;
  for (std::size_t mu = 0; mu < n; ++mu) {
    double mass = 0;
    const double mean =
        expectation(model, theta, [&](double x, double) { return score(model, x, theta, mu); },
                    &mass);
    check_normalization(mass);
    residual = std::max(residual, std::abs(mean));
  }
  if (residual > kRegularityHard)
    fail(errc::regularity_violation, "mean score exceeds 1e-3, model inconsistent");
  rep.regularity_residual = residual;
  for (std::size_t mu = 0; mu < n; ++mu)
    for (std::size_t nu = mu; nu < n; ++nu) {
      const double v = expectation(
          model, theta,
          [&](double x, double) { return score(model, x, theta, mu) * score(model, x, theta, nu); },
          nullptr);
      rep.fim(mu, nu) = v;
      rep.fim(nu, mu) = v;
    }
  rep.crb = sym_inverse(rep.fim, &rep.crb_pseudo_inverse);
  return rep;
}

double cramer_rao_bound(double fi, long n_trials) {
  if (n_trials < 1) fail(errc::domain_violation, "n_trials must be >= 1");
  if (!(fi > 0)) fail(errc::non_positive_information, "Fisher information must be positive");
  return 1.0 / (static_cast<double>(n_trials) * fi);
}

ProbModel born_model(const ParamFamily& fam, const std::vector<ComplexMatrix>& povm) {
  if (povm.empty()) fail(errc::not_a_povm, "empty POVM");
  const std::size_t d = povm.front().rows();
  ComplexMatrix sum(d, d);
  for (const auto& pi : povm) {
    if (pi.rows() != d || pi.cols() != d) fail(errc::not_a_povm, "POVM element shape mismatch");
    const double scale = std::max(1.0, pi.norm_inf());
    if (!pi.is_hermitian(1e-10 * scale)) fail(errc::not_a_povm, "POVM element not Hermitian");
    auto eig = hermitian_eigen(pi);
    if (eig.eigenvalues.front() < -1e-10) fail(errc::not_a_povm, "POVM element not PSD");
    sum += pi;
  }
  sum -= ComplexMatrix::identity(d);
  if (sum.norm_inf() > 1e-10) fail(errc::not_a_povm, "POVM does not resolve the identity");

  auto povm_copy = povm;
  ProbModel model;
  model.kind = ProbModel::Kind::discrete;
  model.n_params = fam.n_params();
  model.n_outcomes = povm.size();
  model.prob = [fam, povm_copy](double x, const std::vector<double>& theta) {
    const auto rho = fam.evaluate(theta);
    const std::size_t idx = static_cast<std::size_t>(x);
    double p = mat_mul(rho.mat(), povm_copy[idx]).trace().real();
    if (p < 0 && p > -1e-12) p = 0;  // clip eigensolver rounding
    return p;
  };
  model.score_analytic = [fam, povm_copy](double x, const std::vector<double>& theta,
                                          std::size_t mu) {
    const std::size_t idx = static_cast<std::size_t>(x);
    const double p = mat_mul(fam.evaluate(theta).mat(), povm_copy[idx]).trace().real();
    if (p <= 0) fail(errc::zero_probability, "score undefined at zero probability");
    const double dp = mat_mul(fam.derivative(theta, mu), povm_copy[idx]).trace().real();
    return dp / p;
  };
  return model;
}

ProbModel normal_model() {
  ProbModel model;
  model.kind = ProbModel::Kind::continuous;
  model.n_params = 2;  // theta = (mu, sigma^2)
  model.quad_order = 200;
  model.interval = [](const std::vector<double>& theta) {
    const double sigma = std::sqrt(theta[1]);
    return std::make_pair(theta[0] - 12.0 * sigma, theta[0] + 12.0 * sigma);
  };
  model.prob = [](double x, const std::vector<double>& theta) {
    const double var = theta[1];
    if (!(var > 0)) fail(errc::domain_violation, "variance must be positive");
    const double z = x - theta[0];
    return std::exp(-z * z / (2.0 * var)) / std::sqrt(2.0 * M_PI * var);
  };
  model.score_analytic = [](double x, const std::vector<double>& theta, std::size_t mu) {
    const double var = theta[1];
    const double z = x - theta[0];
    if (mu == 0) return z / var;
    return (z * z - var) / (2.0 * var * var);  // d log p / d sigma^2
  };
  return model;
}

ProbModel qubit_pvm_prob_model() {
  ProbModel model;
  model.kind = ProbModel::Kind::discrete;
  model.n_params = 1;
  model.n_outcomes = 2;
  model.prob = [](double x, const std::vector<double>& theta) {
    const auto [pp, pm] = qubit_pvm_model(theta[0]);
    return x < 0.5 ? pp : pm;
  };
  model.score_analytic = [](double x, const std::vector<double>& theta, std::size_t) {
    const auto [pp, pm] = qubit_pvm_model(theta[0]);
    const double s = std::sin(theta[0] / 2.0);
    const double dp = -s / 4.0;  // d p(+)/d theta; the minus outcome gets +s/4
    const double p = x < 0.5 ? pp : pm;
    if (p <= 0) fail(errc::zero_probability, "score undefined at zero probability");
    return (x < 0.5 ? dp : -dp) / p;
  };
  return model;
}

}  // namespace qestkit
