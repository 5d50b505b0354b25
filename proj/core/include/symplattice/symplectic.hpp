#pragma once

#include <complex>
#include <iosfwd>
#include <vector>

#include "symplattice/matrix.hpp"

namespace symplattice {

inline constexpr double kSymplecticTol = 1e-9;

// J_{2d} = (0, I; -I, 0)
Matrix standard_j(int d);
IntMatrix standard_j_exact(int d);

// x^T J y
double omega(const Vector& x, const Vector& y);
Integer omega(const IntVector& x, const IntVector& y);

bool is_symplectic(const Matrix& g, double tol = kSymplecticTol);
bool is_symplectic(const IntMatrix& g);

// k^T k = I and k^T J k = J
bool is_orthogonal_symplectic(const Matrix& k, double tol = kSymplecticTol);

// Real 2d x 2d matrix checked against the symplectic form on construction.
class SymplecticMatrix {
 public:
  SymplecticMatrix() = default;
  explicit SymplecticMatrix(Matrix m, double tol = kSymplecticTol);
  // Skips validation; for products of already validated factors.
  static SymplecticMatrix unchecked(Matrix m);

  int dim_d() const { return static_cast<int>(m_.rows() / 2); }
  const Matrix& matrix() const { return m_; }
  double operator()(std::size_t i, std::size_t j) const { return m_(i, j); }

  // -J g^T J
  SymplecticMatrix inverse() const;

 private:
  Matrix m_;
};

SymplecticMatrix operator*(const SymplecticMatrix& a, const SymplecticMatrix& b);

// Exact element of Sp(2d, Z).
class IntegerSymplecticMatrix {
 public:
  IntegerSymplecticMatrix() = default;
  explicit IntegerSymplecticMatrix(IntMatrix m);

  int dim_d() const { return static_cast<int>(m_.rows() / 2); }
  const IntMatrix& matrix() const { return m_; }
  IntegerSymplecticMatrix inverse() const;
  Matrix to_double() const { return m_.to_double(); }

 private:
  IntMatrix m_;
};

IntegerSymplecticMatrix operator*(const IntegerSymplecticMatrix& a, const IntegerSymplecticMatrix& b);

// -J g^T J, the exact inverse of a symplectic integer matrix
IntMatrix symplectic_inverse(const IntMatrix& g);

// a_t = diag(e^t I, e^-t I)
SymplecticMatrix diag_flow(int d, double t);
// diag(a_1..a_d, 1/a_1..1/a_d)
Matrix diag_a(const Vector& a);

struct IwasawaFactors {
  SymplecticMatrix k;
  Vector a;
  SymplecticMatrix n;

  Matrix reconstruct() const;
};

// g = k diag(a, 1/a) n. Throws DegeneracyError when cond(g) exceeds cond_limit.
IwasawaFactors iwasawa_decompose(const SymplecticMatrix& g, double cond_limit = 1e12);

// True when n = (N, M; 0, N^-T) with N unit upper triangular and N M^T = M N^T.
bool is_unipotent(const Matrix& n, double tol = kSymplecticTol);

// Unitary model of K = SO(2d) ∩ Sp(2d,R): U = A + iB  <->  (A, -B; B, A).
using Complex = std::complex<double>;

class ComplexMatrix {
 public:
  ComplexMatrix() = default;
  explicit ComplexMatrix(std::size_t n) : n_(n), a_(n * n) {}
  static ComplexMatrix identity(std::size_t n);
  std::size_t size() const { return n_; }
  Complex& operator()(std::size_t i, std::size_t j) { return a_[i * n_ + j]; }
  const Complex& operator()(std::size_t i, std::size_t j) const { return a_[i * n_ + j]; }

 private:
  std::size_t n_ = 0;
  std::vector<Complex> a_;
};

ComplexMatrix operator*(const ComplexMatrix& a, const ComplexMatrix& b);
// Gram-Schmidt on the columns, run twice.
void orthonormalize_columns(ComplexMatrix& u);
Matrix unitary_to_symplectic(const ComplexMatrix& u);
ComplexMatrix symplectic_to_unitary(const Matrix& k);

// Text format: "d=<int>" then 2d rows of 2d numbers.
Matrix read_matrix_text(std::istream& in);
void write_matrix_text(std::ostream& out, const Matrix& m);

}  // namespace symplattice
