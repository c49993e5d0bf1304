#include "qestkit/correlations.hpp"

#include <cmath>
#include <exception>
#include <limits>

#include "qestkit/numkit.hpp"
#include "qestkit/qfi.hpp"

namespace qestkit {

namespace {

void check_observable(const DensityMatrix& rho, const ComplexMatrix& k) {
  if (k.rows() != rho.dim() || k.cols() != rho.dim())
    fail(errc::dimension_mismatch, "observable shape does not match the state");
  if (!k.is_hermitian(1e-10 * std::max(1.0, k.norm_inf())))
    fail(errc::not_hermitian, "observable must be Hermitian");
}

double max_eigenvalue_sym(const RealMatrix& m) {
  return real_sym_eigen(m).eigenvalues.back();
}

// sigma x 1 (or lambda x 1) for every generator of the measured side
std::vector<ComplexMatrix> side_a_generators(std::size_t d1, std::size_t d2) {
  const auto gens = su_generators(d1);
  const auto id = ComplexMatrix::identity(d2);
  std::vector<ComplexMatrix> out;
  out.reserve(gens.size());
  for (const auto& g : gens) out.push_back(kron(g, id));
  return out;
}

}  // namespace

double skew_information(const DensityMatrix& rho, const ComplexMatrix& k) {
  check_observable(rho, k);
  const auto sq = matrix_sqrt_psd(rho.mat());
  const double t1 = mat_mul(mat_mul(rho.mat(), k), k).trace().real();
  const double t2 = mat_mul(mat_mul(mat_mul(sq, k), sq), k).trace().real();
  return std::max(0.0, t1 - t2);
}

double variance_observable(const DensityMatrix& rho, const ComplexMatrix& k) {
  check_observable(rho, k);
  const double second = mat_mul(mat_mul(rho.mat(), k), k).trace().real();
  const double first = mat_mul(rho.mat(), k).trace().real();
  return std::max(0.0, second - first * first);
}

double qfi_quarter(const DensityMatrix& rho, const ComplexMatrix& k, double tol) {
  check_observable(rho, k);
  const auto eig = hermitian_eigen(rho.mat());
  const auto kt = mat_mul(mat_mul(eig.eigenvectors.dagger(), k), eig.eigenvectors);
  const double cutoff = tol * rho.mat().trace().real();
  const std::size_t d = rho.dim();
  double acc = mat_mul(mat_mul(rho.mat(), k), k).trace().real();
  for (std::size_t m = 0; m < d; ++m)
    for (std::size_t n = 0; n < d; ++n) {
      const double denom = eig.eigenvalues[m] + eig.eigenvalues[n];
      if (denom <= cutoff) continue;
      acc -= 2.0 * eig.eigenvalues[m] * eig.eigenvalues[n] / denom * std::norm(kt(m, n));
    }
  return std::max(0.0, acc);
}

CorrelationReport lqfi(const DensityMatrix& rho_ab, std::size_t dim_b) {
  if (dim_b == 0 || rho_ab.dim() != 2 * dim_b)
    fail(errc::not_a_qubit_side, "measured side must be a qubit");
  const auto s = side_a_generators(2, dim_b);
  const auto eig = hermitian_eigen(rho_ab.mat());
  const std::size_t d = rho_ab.dim();
  std::vector<ComplexMatrix> st;
  st.reserve(3);
  for (const auto& g : s)
    st.push_back(mat_mul(mat_mul(eig.eigenvectors.dagger(), g), eig.eigenvectors));

  // all pairs with weight, the diagonal included; restricting to i != j would
  // zero M on every pure state
  RealMatrix m(3, 3);
  for (std::size_t l = 0; l < 3; ++l)
    for (std::size_t k = l; k < 3; ++k) {
      cplx acc = 0;
      for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = 0; j < d; ++j) {
          const double denom = eig.eigenvalues[i] + eig.eigenvalues[j];
          if (denom <= 1e-12) continue;
          acc += 2.0 * eig.eigenvalues[i] * eig.eigenvalues[j] / denom * st[l](i, j) *
                 st[k](j, i);
        }
      m(l, k) = acc.real();
      m(k, l) = acc.real();
    }

  CorrelationReport rep;
  rep.measure = "lqfi";
  rep.optimizer_matrix = m;
  rep.max_eigenvalue = max_eigenvalue_sym(m);
  rep.value = std::max(0.0, 1.0 - rep.max_eigenvalue);
  return rep;
}

CorrelationReport lqu_qubit(const DensityMatrix& rho_ab, std::size_t dim_b) {
  if (dim_b == 0 || rho_ab.dim() != 2 * dim_b)
    fail(errc::not_a_qubit_side, "measured side must be a qubit");
  const auto s = side_a_generators(2, dim_b);
  const auto sq = matrix_sqrt_psd(rho_ab.mat());
  RealMatrix w(3, 3);
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = i; j < 3; ++j) {
      const double v = mat_mul(mat_mul(mat_mul(sq, s[i]), sq), s[j]).trace().real();
      w(i, j) = v;
      w(j, i) = v;
    }
  CorrelationReport rep;
  rep.measure = "lqu";
  rep.optimizer_matrix = w;
  rep.max_eigenvalue = max_eigenvalue_sym(w);
  rep.value = std::max(0.0, 1.0 - rep.max_eigenvalue);
  return rep;
}

MultiqubitLqu lqu_multiqubit_average(const DensityMatrix& rho, std::size_t n_qubits) {
  if (n_qubits == 0) fail(errc::dimension_not_power_of_two, "need at least one qubit");
  if (n_qubits > 8) fail(errc::dimension_cap_exceeded, "site average capped at 8 qubits");
  std::size_t d = 1;
  for (std::size_t k = 0; k < n_qubits; ++k) d *= 2;
  if (rho.dim() != d)
    fail(errc::dimension_not_power_of_two, "state dimension is not 2^n_qubits");

  const auto sq = matrix_sqrt_psd(rho.mat());
  const auto sigma = su_generators(2);
  const std::vector<std::size_t> dims(n_qubits, 2);

  MultiqubitLqu out;
  out.per_site.resize(n_qubits);
  std::exception_ptr first_error;
#pragma omp parallel for if (n_qubits > 1)
  for (std::size_t site = 0; site < n_qubits; ++site) {
    try {
      RealMatrix w(3, 3);
      for (std::size_t i = 0; i < 3; ++i) {
        const auto si = embed_local(sigma[i], dims, site);
        const auto left = mat_mul(mat_mul(sq, si), sq);
        for (std::size_t j = i; j < 3; ++j) {
          const auto sj = embed_local(sigma[j], dims, site);
          const double v = mat_mul(left, sj).trace().real();
          w(i, j) = v;
          w(j, i) = v;
        }
      }
      out.per_site[site] = std::max(0.0, 1.0 - max_eigenvalue_sym(w));
    } catch (...) {
#pragma omp critical
      if (!first_error) first_error = std::current_exception();
    }
  }
  if (first_error) std::rethrow_exception(first_error);
  for (double v : out.per_site) out.average += v;
  out.average /= static_cast<double>(n_qubits);
  return out;
}

CorrelationReport lqu_qudit(const DensityMatrix& rho, std::size_t d1, std::size_t d2) {
  if (d1 < 2 || d2 < 1 || rho.dim() != d1 * d2)
    fail(errc::dimension_mismatch, "state dimension must factor as d1 * d2");
  const auto lam = su_generators(d1);
  const std::size_t ng = lam.size();
  const auto s = side_a_generators(d1, d2);
  const auto sq = matrix_sqrt_psd(rho.mat());

  std::vector<double> p(ng);
  for (std::size_t k = 0; k < ng; ++k) p[k] = mat_mul(rho.mat(), s[k]).trace().real();

  // What_ij = Tr(sqrt(rho) S_i sqrt(rho) S_j) - sum_k g_ijk P_k; for d1 = 2 the
  // anticommutators are scalar so the correction vanishes identically
  RealMatrix what(ng, ng);
  for (std::size_t i = 0; i < ng; ++i)
    for (std::size_t j = i; j < ng; ++j) {
      double v = mat_mul(mat_mul(mat_mul(sq, s[i]), sq), s[j]).trace().real();
      const auto anti = anticommutator(lam[i], lam[j]);
      for (std::size_t k = 0; k < ng; ++k)
        v -= 0.25 * mat_mul(anti, lam[k]).trace().real() * p[k];
      what(i, j) = v;
      what(j, i) = v;
    }

  CorrelationReport rep;
  rep.measure = "lqu_qudit";
  rep.optimizer_matrix = what;
  rep.max_eigenvalue = max_eigenvalue_sym(what);
  rep.value = std::max(0.0, 2.0 / static_cast<double>(d1) - rep.max_eigenvalue);
  return rep;
}

double hellinger_distance_sq(const DensityMatrix& rho, const DensityMatrix& sigma) {
  if (rho.dim() != sigma.dim()) fail(errc::dimension_mismatch, "states must share a dimension");
  const double overlap =
      mat_mul(matrix_sqrt_psd(rho.mat()), matrix_sqrt_psd(sigma.mat())).trace().real();
  return std::min(1.0, std::max(0.0, 1.0 - overlap));
}

PrecisionChain precision_chain(const DensityMatrix& rho_ab, std::size_t dim_b) {
  PrecisionChain out;
  out.lqu = lqu_qubit(rho_ab, dim_b).value;
  out.lqfi = lqfi(rho_ab, dim_b).value;
  if (out.lqu > out.lqfi + 1e-9 || out.lqfi > 2.0 * out.lqu + 1e-9)
    fail(errc::range_violation, "sandwich U <= Q_F <= 2U violated beyond tolerance");
  const double inf = std::numeric_limits<double>::infinity();
  out.zero_correlation = !(out.lqu > 1e-12 && out.lqfi > 1e-12);
  out.bound_lqu = out.lqu > 1e-12 ? 1.0 / out.lqu : inf;
  out.bound_lqfi = out.lqfi > 1e-12 ? 1.0 / out.lqfi : inf;
  return out;
}

}  // namespace qestkit
