#include "qestkit/complex_matrix.hpp"

#include <cmath>

#include "qestkit/numkit.hpp"

namespace qestkit {

const char* errc_name(errc c) {
  switch (c) {
    case errc::not_square: return "NotSquare";
    case errc::not_hermitian: return "NotHermitian";
    case errc::not_psd: return "NotPSD";
    case errc::not_normalized: return "NotNormalized";
    case errc::convergence_failure: return "ConvergenceFailure";
    case errc::dimension_mismatch: return "DimensionMismatch";
    case errc::dimension_cap_exceeded: return "DimensionCapExceeded";
    case errc::domain_violation: return "DomainViolation";
    case errc::step_underflow: return "StepUnderflow";
    case errc::zero_probability: return "ZeroProbability";
    case errc::regularity_violation: return "RegularityViolation";
    case errc::quadrature_failure: return "QuadratureFailure";
    case errc::non_positive_information: return "NonPositiveInformation";
    case errc::not_a_povm: return "NotAPovm";
    case errc::degenerate_spectrum: return "DegenerateSpectrum";
    case errc::rank_deficient: return "RankDeficient";
    case errc::solve_failure: return "SolveFailure";
    case errc::extrapolation_unstable: return "ExtrapolationUnstable";
    case errc::not_x_state: return "NotXState";
    case errc::singular_fim: return "SingularFim";
    case errc::range_violation: return "RangeViolation";
    case errc::bloch_norm_exceeded: return "BlochNormExceeded";
    case errc::not_a_qubit_side: return "NotAQubitSide";
    case errc::dimension_not_power_of_two: return "DimensionNotPowerOfTwo";
    case errc::zero_correlation: return "ZeroCorrelation";
    case errc::bad_input: return "BadInput";
  }
  return "UnknownError";
}

void ComplexMatrix::check_shape() const {
  if (rows_ > kDimCap || cols_ > kDimCap)
    fail(errc::dimension_cap_exceeded,
         "matrix side exceeds " + std::to_string(kDimCap));
}

ComplexMatrix::ComplexMatrix(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols), a_(rows * cols, cplx(0, 0)) {
  check_shape();
}

ComplexMatrix::ComplexMatrix(std::size_t rows, std::size_t cols, std::vector<cplx> entries)
    : rows_(rows), cols_(cols), a_(std::move(entries)) {
  check_shape();
  if (a_.size() != rows_ * cols_)
    fail(errc::dimension_mismatch, "entry count does not match rows*cols");
  if (!all_finite()) fail(errc::bad_input, "non-finite matrix entry");
}

ComplexMatrix::ComplexMatrix(std::initializer_list<std::initializer_list<cplx>> rows)
    : rows_(rows.size()), cols_(rows.size() ? rows.begin()->size() : 0) {
  check_shape();
  a_.reserve(rows_ * cols_);
  for (const auto& r : rows) {
    if (r.size() != cols_) fail(errc::dimension_mismatch, "ragged initializer");
    a_.insert(a_.end(), r.begin(), r.end());
  }
  if (!all_finite()) fail(errc::bad_input, "non-finite matrix entry");
}

ComplexMatrix ComplexMatrix::identity(std::size_t d) {
  ComplexMatrix m(d, d);
  for (std::size_t i = 0; i < d; ++i) m(i, i) = 1.0;
  return m;
}

cplx ComplexMatrix::trace() const {
  if (!is_square()) fail(errc::not_square, "trace of non-square matrix");
  cplx t = 0;
  for (std::size_t i = 0; i < rows_; ++i) t += (*this)(i, i);
  return t;
}

ComplexMatrix ComplexMatrix::dagger() const {
  ComplexMatrix m(cols_, rows_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) m(j, i) = std::conj((*this)(i, j));
  return m;
}

ComplexMatrix ComplexMatrix::transpose() const {
  ComplexMatrix m(cols_, rows_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) m(j, i) = (*this)(i, j);
  return m;
}

ComplexMatrix ComplexMatrix::conjugate() const {
  ComplexMatrix m(rows_, cols_);
  for (std::size_t i = 0; i < a_.size(); ++i) m.a_[i] = std::conj(a_[i]);
  return m;
}

double ComplexMatrix::norm_inf() const noexcept {
  double m = 0;
  for (const auto& z : a_) m = std::max(m, std::abs(z));
  return m;
}

bool ComplexMatrix::is_hermitian(double tol) const noexcept {
  if (!is_square()) return false;
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = i; j < cols_; ++j)
      if (std::abs((*this)(i, j) - std::conj((*this)(j, i))) > tol) return false;
  return true;
}

bool ComplexMatrix::all_finite() const noexcept {
  for (const auto& z : a_)
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return false;
  return true;
}

ComplexMatrix& ComplexMatrix::operator+=(const ComplexMatrix& rhs) {
  if (rows_ != rhs.rows_ || cols_ != rhs.cols_)
    fail(errc::dimension_mismatch, "matrix addition shape mismatch");
  for (std::size_t i = 0; i < a_.size(); ++i) a_[i] += rhs.a_[i];
  return *this;
}

ComplexMatrix& ComplexMatrix::operator-=(const ComplexMatrix& rhs) {
  if (rows_ != rhs.rows_ || cols_ != rhs.cols_)
    fail(errc::dimension_mismatch, "matrix subtraction shape mismatch");
  for (std::size_t i = 0; i < a_.size(); ++i) a_[i] -= rhs.a_[i];
  return *this;
}

ComplexMatrix& ComplexMatrix::operator*=(cplx s) {
  for (auto& z : a_) z *= s;
  return *this;
}

ComplexMatrix operator*(const ComplexMatrix& a, const ComplexMatrix& b) { return mat_mul(a, b); }

RealMatrix RealMatrix::identity(std::size_t d) {
  RealMatrix m(d, d);
  for (std::size_t i = 0; i < d; ++i) m(i, i) = 1.0;
  return m;
}

double RealMatrix::norm_inf() const noexcept {
  double m = 0;
  for (double v : a_) m = std::max(m, std::abs(v));
  return m;
}

double RealMatrix::max_asymmetry() const noexcept {
  double m = 0;
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = i + 1; j < cols_; ++j)
      m = std::max(m, std::abs((*this)(i, j) - (*this)(j, i)));
  return m;
}

ComplexMatrix commutator(const ComplexMatrix& a, const ComplexMatrix& b) {
  return mat_mul(a, b) - mat_mul(b, a);
}

ComplexMatrix anticommutator(const ComplexMatrix& a, const ComplexMatrix& b) {
  return mat_mul(a, b) + mat_mul(b, a);
}

}  // namespace qestkit
