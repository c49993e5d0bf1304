#include "qestkit/numkit.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdint>

namespace qestkit {

namespace {

Eigen::MatrixXcd to_eigen(const ComplexMatrix& m) {
  Eigen::MatrixXcd e(m.rows(), m.cols());
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) e(static_cast<long>(i), static_cast<long>(j)) = m(i, j);
  return e;
}

ComplexMatrix from_eigen(const Eigen::MatrixXcd& e) {
  ComplexMatrix m(static_cast<std::size_t>(e.rows()), static_cast<std::size_t>(e.cols()));
  for (long i = 0; i < e.rows(); ++i)
    for (long j = 0; j < e.cols(); ++j) m(static_cast<std::size_t>(i), static_cast<std::size_t>(j)) = e(i, j);
  return m;
}

Eigen::MatrixXd to_eigen_real(const RealMatrix& m) {
  Eigen::MatrixXd e(m.rows(), m.cols());
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) e(static_cast<long>(i), static_cast<long>(j)) = m(i, j);
  return e;
}

RealMatrix from_eigen_real(const Eigen::MatrixXd& e) {
  RealMatrix m(static_cast<std::size_t>(e.rows()), static_cast<std::size_t>(e.cols()));
  for (long i = 0; i < e.rows(); ++i)
    for (long j = 0; j < e.cols(); ++j) m(static_cast<std::size_t>(i), static_cast<std::size_t>(j)) = e(i, j);
  return m;
}

}  // namespace

HermitianEigen hermitian_eigen(const ComplexMatrix& m) {
  if (!m.is_square()) fail(errc::not_square, "eigendecomposition input not square");
  const double scale = m.norm_inf();
  if (!m.is_hermitian(1e-10 * std::max(1.0, scale)))
    fail(errc::not_hermitian, "asymmetry beyond 1e-10 * norm");
  Eigen::MatrixXcd e = to_eigen(m);
  e = 0.5 * (e + e.adjoint().eval());  // symmetrize away rounding
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(e);
  if (solver.info() != Eigen::Success)
    fail(errc::convergence_failure, "Hermitian eigensolver did not converge");
  HermitianEigen out;
  out.eigenvalues.assign(solver.eigenvalues().data(),
                         solver.eigenvalues().data() + solver.eigenvalues().size());
  out.eigenvectors = from_eigen(solver.eigenvectors());
  return out;
}

ComplexMatrix matrix_sqrt_psd(const ComplexMatrix& m, double clip) {
  auto eig = hermitian_eigen(m);
  if (clip < 0) clip = 1e-10 * std::abs(m.trace().real());
  const std::size_t d = m.rows();
  for (double w : eig.eigenvalues)
    if (w < -clip) fail(errc::not_psd, "eigenvalue below -clip in matrix square root");
  // Eigenvalues at the representation floor are noise; sqrt would blow the
  // noise up from eps to sqrt(eps) = 1e-8 and pollute the root of any state
  // with an (almost) degenerate kernel, so zero them first.
  double wmax = 0;
  for (double w : eig.eigenvalues) wmax = std::max(wmax, w);
  const double floor_tol = 1e-13 * wmax;
  ComplexMatrix out(d, d);
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < d; ++j) {
      cplx s = 0;
      for (std::size_t k = 0; k < d; ++k) {
        if (eig.eigenvalues[k] <= floor_tol) continue;
        const double w = std::sqrt(eig.eigenvalues[k]);
        s += eig.eigenvectors(i, k) * w * std::conj(eig.eigenvectors(j, k));
      }
      out(i, j) = s;
    }
  return out;
}

ComplexMatrix mat_mul(const ComplexMatrix& a, const ComplexMatrix& b) {
  if (a.cols() != b.rows()) fail(errc::dimension_mismatch, "mat_mul shape mismatch");
  ComplexMatrix c(a.rows(), b.cols());
  const std::int64_t n = static_cast<std::int64_t>(a.rows());
  const std::int64_t m = static_cast<std::int64_t>(b.cols());
  const std::int64_t k = static_cast<std::int64_t>(a.cols());
#pragma omp parallel for collapse(2) if (n * m * k > 4096)
  for (std::int64_t i = 0; i < n; ++i)
    for (std::int64_t j = 0; j < m; ++j) {
      cplx s = 0;
      for (std::int64_t l = 0; l < k; ++l)
        s += a(static_cast<std::size_t>(i), static_cast<std::size_t>(l)) *
             b(static_cast<std::size_t>(l), static_cast<std::size_t>(j));
      c(static_cast<std::size_t>(i), static_cast<std::size_t>(j)) = s;
    }
  return c;
}

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b) {
  const std::size_t ra = a.rows(), ca = a.cols(), rb = b.rows(), cb = b.cols();
  ComplexMatrix c(ra * rb, ca * cb);
  const std::int64_t nra = static_cast<std::int64_t>(ra);
#pragma omp parallel for if (ra * rb * ca * cb > 4096)
  for (std::int64_t ii = 0; ii < nra; ++ii) {
    const std::size_t i = static_cast<std::size_t>(ii);
    for (std::size_t j = 0; j < ca; ++j) {
      const cplx aij = a(i, j);
      for (std::size_t k = 0; k < rb; ++k)
        for (std::size_t l = 0; l < cb; ++l) c(i * rb + k, j * cb + l) = aij * b(k, l);
    }
  }
  return c;
}

std::vector<cplx> vec(const ComplexMatrix& a) {
  if (!a.is_square()) fail(errc::not_square, "vec of non-square matrix");
  const std::size_t d = a.rows();
  std::vector<cplx> v(d * d);
  for (std::size_t j = 0; j < d; ++j)
    for (std::size_t i = 0; i < d; ++i) v[j * d + i] = a(i, j);
  return v;
}

ComplexMatrix unvec(const std::vector<cplx>& v, std::size_t d) {
  if (v.size() != d * d) fail(errc::dimension_mismatch, "unvec length mismatch");
  ComplexMatrix a(d, d);
  for (std::size_t j = 0; j < d; ++j)
    for (std::size_t i = 0; i < d; ++i) a(i, j) = v[j * d + i];
  return a;
}

namespace {

// Shared index bookkeeping for the partial trace: output entry (r, c) over the
// kept factors accumulates input entries with matching traced indices.
struct TraceIndexer {
  std::vector<std::size_t> dims, keep, traced;
  std::vector<std::size_t> stride;  // row-major strides of the full space
  std::size_t dim_keep = 1, dim_traced = 1;

  TraceIndexer(const std::vector<std::size_t>& dims_in, const std::vector<std::size_t>& keep_in,
               std::size_t total_dim) {
    dims = dims_in;
    keep = keep_in;
    std::size_t prod = 1;
    for (std::size_t d : dims) prod *= d;
    if (prod != total_dim) fail(errc::dimension_mismatch, "subsystem dims do not factor the matrix");
    if (keep.empty()) fail(errc::dimension_mismatch, "keep set must be non-empty");
    std::vector<bool> kept(dims.size(), false);
    for (std::size_t k : keep) {
      if (k >= dims.size()) fail(errc::dimension_mismatch, "keep index out of range");
      kept[k] = true;
    }
    for (std::size_t s = 0; s < dims.size(); ++s)
      if (!kept[s]) traced.push_back(s);
    stride.assign(dims.size(), 1);
    for (std::size_t s = dims.size(); s-- > 1;) stride[s - 1] = stride[s] * dims[s];
    for (std::size_t k : keep) dim_keep *= dims[k];
    for (std::size_t s : traced) dim_traced *= dims[s];
  }

  // Decompose a composite index over the listed subsystems into a full-space offset.
  std::size_t offset(const std::vector<std::size_t>& subs, std::size_t composite) const {
    std::size_t off = 0;
    for (std::size_t s = subs.size(); s-- > 0;) {
      const std::size_t d = dims[subs[s]];
      off += (composite % d) * stride[subs[s]];
      composite /= d;
    }
    return off;
  }
};

template <typename Body>
void partial_trace_impl(const ComplexMatrix& m, const TraceIndexer& ix, Body&& body) {
  for (std::size_t r = 0; r < ix.dim_keep; ++r)
    for (std::size_t c = 0; c < ix.dim_keep; ++c) {
      const std::size_t ro = ix.offset(ix.keep, r), co = ix.offset(ix.keep, c);
      cplx s = 0;
      for (std::size_t t = 0; t < ix.dim_traced; ++t) {
        const std::size_t to = ix.offset(ix.traced, t);
        s += m(ro + to, co + to);
      }
      body(r, c, s);
    }
}

}  // namespace

ComplexMatrix partial_trace(const ComplexMatrix& m, const std::vector<std::size_t>& dims,
                            const std::vector<std::size_t>& keep) {
  if (!m.is_square()) fail(errc::not_square, "partial trace of non-square matrix");
  TraceIndexer ix(dims, keep, m.rows());
  ComplexMatrix out(ix.dim_keep, ix.dim_keep);
  const std::int64_t n = static_cast<std::int64_t>(ix.dim_keep);
#pragma omp parallel for collapse(2) if (ix.dim_keep * ix.dim_keep * ix.dim_traced > 4096)
  for (std::int64_t r = 0; r < n; ++r)
    for (std::int64_t c = 0; c < n; ++c) {
      const std::size_t ro = ix.offset(ix.keep, static_cast<std::size_t>(r));
      const std::size_t co = ix.offset(ix.keep, static_cast<std::size_t>(c));
      cplx s = 0;
      for (std::size_t t = 0; t < ix.dim_traced; ++t) {
        const std::size_t to = ix.offset(ix.traced, t);
        s += m(ro + to, co + to);
      }
      out(static_cast<std::size_t>(r), static_cast<std::size_t>(c)) = s;
    }
  return out;
}

std::vector<ComplexMatrix> su_generators(std::size_t d) {
  if (d < 2) fail(errc::domain_violation, "su generators need d >= 2");
  std::vector<ComplexMatrix> gens;
  gens.reserve(d * d - 1);
  for (std::size_t j = 0; j < d; ++j)
    for (std::size_t k = j + 1; k < d; ++k) {
      ComplexMatrix m(d, d);
      m(j, k) = 1.0;
      m(k, j) = 1.0;
      gens.push_back(std::move(m));
    }
  for (std::size_t j = 0; j < d; ++j)
    for (std::size_t k = j + 1; k < d; ++k) {
      ComplexMatrix m(d, d);
      m(j, k) = cplx(0, -1);
      m(k, j) = cplx(0, 1);
      gens.push_back(std::move(m));
    }
  for (std::size_t l = 1; l < d; ++l) {
    ComplexMatrix m(d, d);
    const double norm = std::sqrt(2.0 / (static_cast<double>(l) * (l + 1)));
    for (std::size_t j = 0; j < l; ++j) m(j, j) = norm;
    m(l, l) = -static_cast<double>(l) * norm;
    gens.push_back(std::move(m));
  }
  // d=2 convention: (sigma_x, sigma_y, sigma_z) is already the emitted order
  return gens;
}

ComplexMatrix embed_local(const ComplexMatrix& op, const std::vector<std::size_t>& dims,
                          std::size_t position) {
  if (position >= dims.size()) fail(errc::dimension_mismatch, "embed position out of range");
  if (op.rows() != dims[position] || op.cols() != dims[position])
    fail(errc::dimension_mismatch, "operator dimension does not match slot");
  ComplexMatrix out = ComplexMatrix::identity(1);
  for (std::size_t s = 0; s < dims.size(); ++s)
    out = kron(out, s == position ? op : ComplexMatrix::identity(dims[s]));
  return out;
}

std::vector<cplx> solve_hpd(const ComplexMatrix& a, const std::vector<cplx>& b) {
  if (!a.is_square() || a.rows() != b.size())
    fail(errc::dimension_mismatch, "solve shape mismatch");
  Eigen::MatrixXcd ea = to_eigen(a);
  Eigen::VectorXcd eb(static_cast<long>(b.size()));
  for (std::size_t i = 0; i < b.size(); ++i) eb(static_cast<long>(i)) = b[i];
  Eigen::LDLT<Eigen::MatrixXcd> ldlt(ea);
  if (ldlt.info() != Eigen::Success) fail(errc::solve_failure, "LDLT factorization failed");
  Eigen::VectorXcd x = ldlt.solve(eb);
  const double resid = (ea * x - eb).norm();
  if (!std::isfinite(resid) || resid > 1e-6 * (1.0 + eb.norm()))
    fail(errc::solve_failure, "linear solve residual too large");
  return std::vector<cplx>(x.data(), x.data() + x.size());
}

RealSymEigen real_sym_eigen(const RealMatrix& m) {
  if (m.rows() != m.cols()) fail(errc::not_square, "real symmetric eigensolve input not square");
  Eigen::MatrixXd e = to_eigen_real(m);
  e = 0.5 * (e + e.transpose().eval());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(e);
  if (solver.info() != Eigen::Success)
    fail(errc::convergence_failure, "real symmetric eigensolver did not converge");
  RealSymEigen out;
  out.eigenvalues.assign(solver.eigenvalues().data(),
                         solver.eigenvalues().data() + solver.eigenvalues().size());
  out.eigenvectors = from_eigen_real(solver.eigenvectors());
  return out;
}

RealMatrix real_mul(const RealMatrix& a, const RealMatrix& b) {
  if (a.cols() != b.rows()) fail(errc::dimension_mismatch, "real_mul shape mismatch");
  RealMatrix c(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < b.cols(); ++j) {
      double s = 0;
      for (std::size_t k = 0; k < a.cols(); ++k) s += a(i, k) * b(k, j);
      c(i, j) = s;
    }
  return c;
}

RealMatrix sym_inverse(const RealMatrix& m, bool* used_pseudo, double rank_tol) {
  auto eig = real_sym_eigen(m);
  const std::size_t n = m.rows();
  double wmax = 0;
  for (double w : eig.eigenvalues) wmax = std::max(wmax, std::abs(w));
  bool pseudo = false;
  RealMatrix inv(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      double s = 0;
      for (std::size_t k = 0; k < n; ++k) {
        const double w = eig.eigenvalues[k];
        if (std::abs(w) <= rank_tol * std::max(wmax, 1e-300)) {
          pseudo = true;
          continue;
        }
        s += eig.eigenvectors(i, k) * eig.eigenvectors(j, k) / w;
      }
      inv(i, j) = s;
    }
  if (wmax == 0) pseudo = true;
  if (used_pseudo) *used_pseudo = pseudo;
  return inv;
}

double sym_determinant(const RealMatrix& m) {
  auto eig = real_sym_eigen(m);
  double det = 1;
  for (double w : eig.eigenvalues) det *= w;
  return det;
}

namespace ref {

ComplexMatrix mat_mul(const ComplexMatrix& a, const ComplexMatrix& b) {
  if (a.cols() != b.rows()) fail(errc::dimension_mismatch, "mat_mul shape mismatch");
  ComplexMatrix c(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < b.cols(); ++j) {
      cplx s = 0;
      for (std::size_t l = 0; l < a.cols(); ++l) s += a(i, l) * b(l, j);
      c(i, j) = s;
    }
  return c;
}

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b) {
  const std::size_t ra = a.rows(), ca = a.cols(), rb = b.rows(), cb = b.cols();
  ComplexMatrix c(ra * rb, ca * cb);
  for (std::size_t i = 0; i < ra; ++i)
    for (std::size_t j = 0; j < ca; ++j) {
      const cplx aij = a(i, j);
      for (std::size_t k = 0; k < rb; ++k)
        for (std::size_t l = 0; l < cb; ++l) c(i * rb + k, j * cb + l) = aij * b(k, l);
    }
  return c;
}

ComplexMatrix partial_trace(const ComplexMatrix& m, const std::vector<std::size_t>& dims,
                            const std::vector<std::size_t>& keep) {
  if (!m.is_square()) fail(errc::not_square, "partial trace of non-square matrix");
  TraceIndexer ix(dims, keep, m.rows());
  ComplexMatrix out(ix.dim_keep, ix.dim_keep);
  partial_trace_impl(m, ix, [&](std::size_t r, std::size_t c, cplx s) { out(r, c) = s; });
  return out;
}

}  // namespace ref

}  // namespace qestkit
