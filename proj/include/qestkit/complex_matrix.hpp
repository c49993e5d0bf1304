#pragma once

#include <complex>
#include <cstddef>
#include <initializer_list>
#include <vector>

#include "qestkit/error.hpp"

namespace qestkit {

using cplx = std::complex<double>;

// Dense row-major complex matrix. Constructors reject non-finite entries and
// sides above kDimCap; in-place writes through operator() are unchecked.
class ComplexMatrix {
 public:
  static constexpr std::size_t kDimCap = 1u << 10;

  ComplexMatrix() : rows_(0), cols_(0) {}
  ComplexMatrix(std::size_t rows, std::size_t cols);
  ComplexMatrix(std::size_t rows, std::size_t cols, std::vector<cplx> entries);
  ComplexMatrix(std::initializer_list<std::initializer_list<cplx>> rows);

  static ComplexMatrix identity(std::size_t d);
  static ComplexMatrix zero(std::size_t rows, std::size_t cols) { return ComplexMatrix(rows, cols); }

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  bool is_square() const noexcept { return rows_ == cols_; }

  cplx& operator()(std::size_t i, std::size_t j) noexcept { return a_[i * cols_ + j]; }
  const cplx& operator()(std::size_t i, std::size_t j) const noexcept { return a_[i * cols_ + j]; }
  const std::vector<cplx>& data() const noexcept { return a_; }
  std::vector<cplx>& data() noexcept { return a_; }

  cplx trace() const;
  ComplexMatrix dagger() const;
  ComplexMatrix transpose() const;
  ComplexMatrix conjugate() const;

  // max |entry|; the norm used for all relative tolerances in this library
  double norm_inf() const noexcept;
  bool is_hermitian(double tol) const noexcept;  // tol is absolute, caller scales
  bool all_finite() const noexcept;

  ComplexMatrix& operator+=(const ComplexMatrix& rhs);
  ComplexMatrix& operator-=(const ComplexMatrix& rhs);
  ComplexMatrix& operator*=(cplx s);

  friend ComplexMatrix operator+(ComplexMatrix lhs, const ComplexMatrix& rhs) { return lhs += rhs; }
  friend ComplexMatrix operator-(ComplexMatrix lhs, const ComplexMatrix& rhs) { return lhs -= rhs; }
  friend ComplexMatrix operator*(cplx s, ComplexMatrix m) { return m *= s; }
  friend ComplexMatrix operator*(ComplexMatrix m, cplx s) { return m *= s; }
  friend ComplexMatrix operator*(const ComplexMatrix& a, const ComplexMatrix& b);

 private:
  std::size_t rows_, cols_;
  std::vector<cplx> a_;
  void check_shape() const;
};

// Small dense real matrix for information matrices and optimizer matrices.
class RealMatrix {
 public:
  RealMatrix() : rows_(0), cols_(0) {}
  RealMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), a_(rows * cols, 0.0) {}

  static RealMatrix identity(std::size_t d);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  double& operator()(std::size_t i, std::size_t j) noexcept { return a_[i * cols_ + j]; }
  const double& operator()(std::size_t i, std::size_t j) const noexcept { return a_[i * cols_ + j]; }
  const std::vector<double>& data() const noexcept { return a_; }

  double norm_inf() const noexcept;
  double max_asymmetry() const noexcept;

 private:
  std::size_t rows_, cols_;
  std::vector<double> a_;
};

ComplexMatrix commutator(const ComplexMatrix& a, const ComplexMatrix& b);
ComplexMatrix anticommutator(const ComplexMatrix& a, const ComplexMatrix& b);

}  // namespace qestkit
