#pragma once

#include <cstddef>
#include <initializer_list>
#include <iosfwd>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

namespace symplattice {

using Vector = std::vector<double>;
using Integer = boost::multiprecision::cpp_int;
using IntVector = std::vector<Integer>;

// Dense row-major real matrix. Sizes here never exceed 16x16.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}
  Matrix(std::initializer_list<std::initializer_list<double>> rows);

  static Matrix identity(std::size_t n);
  static Matrix diagonal(const Vector& diag);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool empty() const { return data_.empty(); }

  double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }
  const double* row_ptr(std::size_t i) const { return data_.data() + i * cols_; }
  const std::vector<double>& data() const { return data_; }

  Vector column(std::size_t j) const;
  void set_column(std::size_t j, const Vector& v);
  Matrix transpose() const;
  Matrix block(std::size_t r0, std::size_t c0, std::size_t nr, std::size_t nc) const;
  void set_block(std::size_t r0, std::size_t c0, const Matrix& b);
  double max_abs() const;

  bool operator==(const Matrix& o) const = default;

 private:
  std::size_t rows_ = 0, cols_ = 0;
  std::vector<double> data_;
};

Matrix operator*(const Matrix& a, const Matrix& b);
Vector operator*(const Matrix& a, const Vector& v);
Matrix operator+(const Matrix& a, const Matrix& b);
Matrix operator-(const Matrix& a, const Matrix& b);
Matrix operator*(double s, const Matrix& a);

double dot(const Vector& a, const Vector& b);
double norm_sq(const Vector& v);
double norm(const Vector& v);

// LU with partial pivoting; throws DegeneracyError on a zero pivot.
Matrix inverse(const Matrix& a);
double determinant(const Matrix& a);

// max |a_ij - b_ij| / max(1, max |b_ij|)
double relative_residual(const Matrix& a, const Matrix& b);

std::ostream& operator<<(std::ostream& os, const Matrix& m);

// Exact integer matrix over arbitrary precision integers.
class IntMatrix {
 public:
  IntMatrix() = default;
  IntMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols) {}
  IntMatrix(std::initializer_list<std::initializer_list<long long>> rows);

  static IntMatrix identity(std::size_t n);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  Integer& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  const Integer& operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  IntVector column(std::size_t j) const;
  void set_column(std::size_t j, const IntVector& v);
  void swap_columns(std::size_t a, std::size_t b);
  // column a += q * column b
  void add_column(std::size_t a, std::size_t b, const Integer& q);
  void negate_column(std::size_t a);
  IntMatrix transpose() const;
  Matrix to_double() const;
  Integer max_abs() const;

  bool operator==(const IntMatrix& o) const = default;

 private:
  std::size_t rows_ = 0, cols_ = 0;
  std::vector<Integer> data_;
};

IntMatrix operator*(const IntMatrix& a, const IntMatrix& b);
IntVector operator*(const IntMatrix& a, const IntVector& v);
IntMatrix operator-(const IntMatrix& a);

// Fraction-free Bareiss elimination.
Integer determinant(const IntMatrix& a);

std::ostream& operator<<(std::ostream& os, const IntMatrix& m);

}  // namespace symplattice
