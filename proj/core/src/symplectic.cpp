#include "symplattice/symplectic.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include "symplattice/error.hpp"

namespace symplattice {

namespace {

void require_even_square(std::size_t rows, std::size_t cols) {
  if (rows != cols || rows == 0 || rows % 2 != 0)
    throw ValidationError("expected a square matrix of even size");
}

// g^T J g - J, exploiting the block structure of J
Matrix form_defect(const Matrix& g) {
  const std::size_t n = g.rows(), d = n / 2;
  Matrix r(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      double s = 0.0;
      for (std::size_t k = 0; k < d; ++k) s += g(k, i) * g(k + d, j) - g(k + d, i) * g(k, j);
      r(i, j) = s;
    }
  for (std::size_t k = 0; k < d; ++k) {
    r(k, k + d) -= 1.0;
    r(k + d, k) += 1.0;
  }
  return r;
}

}  // namespace

Matrix standard_j(int d) {
  if (d < 1) throw ValidationError("d must be at least 1", "d");
  Matrix j(2 * d, 2 * d);
  for (int i = 0; i < d; ++i) {
    j(i, i + d) = 1.0;
    j(i + d, i) = -1.0;
  }
  return j;
}

IntMatrix standard_j_exact(int d) {
  if (d < 1) throw ValidationError("d must be at least 1", "d");
  IntMatrix j(2 * d, 2 * d);
  for (int i = 0; i < d; ++i) {
    j(i, i + d) = 1;
    j(i + d, i) = -1;
  }
  return j;
}

double omega(const Vector& x, const Vector& y) {
  if (x.size() != y.size() || x.size() % 2 != 0 || x.empty())
    throw ValidationError("omega needs two vectors of equal even length");
  const std::size_t d = x.size() / 2;
  double s = 0.0;
  for (std::size_t i = 0; i < d; ++i) s += x[i] * y[i + d] - x[i + d] * y[i];
  return s;
}

Integer omega(const IntVector& x, const IntVector& y) {
  if (x.size() != y.size() || x.size() % 2 != 0 || x.empty())
    throw ValidationError("omega needs two vectors of equal even length");
  const std::size_t d = x.size() / 2;
  Integer s = 0;
  for (std::size_t i = 0; i < d; ++i) s += x[i] * y[i + d] - x[i + d] * y[i];
  return s;
}

bool is_symplectic(const Matrix& g, double tol) {
  require_even_square(g.rows(), g.cols());
  if (!(tol > 0)) throw ValidationError("tolerance must be positive", "tol");
  return form_defect(g).max_abs() <= tol;
}

bool is_symplectic(const IntMatrix& g) {
  require_even_square(g.rows(), g.cols());
  const std::size_t n = g.rows(), d = n / 2;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      Integer s = 0;
      for (std::size_t k = 0; k < d; ++k) s += g(k, i) * g(k + d, j) - g(k + d, i) * g(k, j);
      const int want = (j == i + d) ? 1 : (i == j + d) ? -1 : 0;
      if (s != want) return false;
    }
  return true;
}

bool is_orthogonal_symplectic(const Matrix& k, double tol) {
  if (!is_symplectic(k, tol)) return false;
  return relative_residual(k.transpose() * k, Matrix::identity(k.rows())) <= tol;
}

SymplecticMatrix::SymplecticMatrix(Matrix m, double tol) : m_(std::move(m)) {
  require_even_square(m_.rows(), m_.cols());
  const double defect = form_defect(m_).max_abs();
  if (!(defect <= tol)) {
    std::ostringstream os;
    os << "matrix is not symplectic: |g^T J g - J|_max = " << defect << " > " << tol;
    throw ValidationError(os.str());
  }
}

SymplecticMatrix SymplecticMatrix::unchecked(Matrix m) {
  require_even_square(m.rows(), m.cols());
  SymplecticMatrix s;
  s.m_ = std::move(m);
  return s;
}

SymplecticMatrix SymplecticMatrix::inverse() const {
  const std::size_t n = m_.rows(), d = n / 2;
  // -J g^T J = (D^T, -B^T; -C^T, A^T) for g = (A, B; C, D)
  Matrix r(n, n);
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < d; ++j) {
      r(i, j) = m_(j + d, i + d);
      r(i, j + d) = -m_(j, i + d);
      r(i + d, j) = -m_(j + d, i);
      r(i + d, j + d) = m_(j, i);
    }
  return unchecked(std::move(r));
}

SymplecticMatrix operator*(const SymplecticMatrix& a, const SymplecticMatrix& b) {
  return SymplecticMatrix::unchecked(a.matrix() * b.matrix());
}

IntegerSymplecticMatrix::IntegerSymplecticMatrix(IntMatrix m) : m_(std::move(m)) {
  if (!is_symplectic(m_)) throw ValidationError("integer matrix is not symplectic");
}

IntMatrix symplectic_inverse(const IntMatrix& g) {
  require_even_square(g.rows(), g.cols());
  const std::size_t n = g.rows(), d = n / 2;
  IntMatrix r(n, n);
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < d; ++j) {
      r(i, j) = g(j + d, i + d);
      r(i, j + d) = -g(j, i + d);
      r(i + d, j) = -g(j + d, i);
      r(i + d, j + d) = g(j, i);
    }
  return r;
}

IntegerSymplecticMatrix IntegerSymplecticMatrix::inverse() const {
  return IntegerSymplecticMatrix(symplectic_inverse(m_));
}

IntegerSymplecticMatrix operator*(const IntegerSymplecticMatrix& a, const IntegerSymplecticMatrix& b) {
  return IntegerSymplecticMatrix(a.matrix() * b.matrix());
}

SymplecticMatrix diag_flow(int d, double t) {
  if (d < 1) throw ValidationError("d must be at least 1", "d");
  Vector a(d, std::exp(t));
  return SymplecticMatrix::unchecked(diag_a(a));
}

Matrix diag_a(const Vector& a) {
  const std::size_t d = a.size();
  Matrix m(2 * d, 2 * d);
  for (std::size_t i = 0; i < d; ++i) {
    m(i, i) = a[i];
    m(i + d, i + d) = 1.0 / a[i];
  }
  return m;
}

Matrix IwasawaFactors::reconstruct() const {
  return k.matrix() * diag_a(a) * n.matrix();
}

ComplexMatrix ComplexMatrix::identity(std::size_t n) {
  ComplexMatrix m(n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

ComplexMatrix operator*(const ComplexMatrix& a, const ComplexMatrix& b) {
  const std::size_t n = a.size();
  ComplexMatrix c(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = 0; k < n; ++k)
      for (std::size_t j = 0; j < n; ++j) c(i, j) += a(i, k) * b(k, j);
  return c;
}

void orthonormalize_columns(ComplexMatrix& u) {
  const std::size_t n = u.size();
  for (std::size_t j = 0; j < n; ++j) {
    for (int pass = 0; pass < 2; ++pass)
      for (std::size_t i = 0; i < j; ++i) {
        Complex r = 0.0;
        for (std::size_t k = 0; k < n; ++k) r += std::conj(u(k, i)) * u(k, j);
        for (std::size_t k = 0; k < n; ++k) u(k, j) -= r * u(k, i);
      }
    double nn = 0.0;
    for (std::size_t k = 0; k < n; ++k) nn += std::norm(u(k, j));
    nn = std::sqrt(nn);
    if (!(nn > 1e-300)) throw DegeneracyError("rank deficient complex matrix");
    for (std::size_t k = 0; k < n; ++k) u(k, j) /= nn;
  }
}

Matrix unitary_to_symplectic(const ComplexMatrix& u) {
  const std::size_t d = u.size();
  Matrix k(2 * d, 2 * d);
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < d; ++j) {
      k(i, j) = u(i, j).real();
      k(i, j + d) = -u(i, j).imag();
      k(i + d, j) = u(i, j).imag();
      k(i + d, j + d) = u(i, j).real();
    }
  return k;
}

ComplexMatrix symplectic_to_unitary(const Matrix& k) {
  const std::size_t d = k.rows() / 2;
  ComplexMatrix u(d);
  // average the two copies of each block, which is the projection onto the
  // (A, -B; B, A) pattern
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < d; ++j)
      u(i, j) = Complex(0.5 * (k(i, j) + k(i + d, j + d)), 0.5 * (k(i + d, j) - k(i, j + d)));
  return u;
}

IwasawaFactors iwasawa_decompose(const SymplecticMatrix& gs, double cond_limit) {
  const Matrix& g = gs.matrix();
  const std::size_t n = g.rows(), d = n / 2;

  double fro = 0.0;
  for (double x : g.data()) fro += x * x;
  // for symplectic g the 2-norm condition number is sigma_max^2 <= |g|_F^2
  if (!(fro <= cond_limit)) throw DegeneracyError("matrix too ill-conditioned for Iwasawa decomposition");

  // Column order e_1..e_d, f_d..f_1 makes a*n upper triangular.
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < d; ++i) {
    order[i] = i;
    order[d + i] = n - 1 - i;
  }
  Matrix q(n, n);
  for (std::size_t j = 0; j < n; ++j) {
    Vector v = g.column(order[j]);
    for (int pass = 0; pass < 2; ++pass)
      for (std::size_t i = 0; i < j; ++i) {
        double r = 0.0;
        for (std::size_t k = 0; k < n; ++k) r += q(k, order[i]) * v[k];
        for (std::size_t k = 0; k < n; ++k) v[k] -= r * q(k, order[i]);
      }
    const double nv = norm(v);
    if (!(nv > 0)) throw DegeneracyError("singular matrix in Iwasawa decomposition");
    for (std::size_t k = 0; k < n; ++k) q(k, order[j]) = v[k] / nv;
  }

  ComplexMatrix u = symplectic_to_unitary(q);
  orthonormalize_columns(u);
  Matrix k = unitary_to_symplectic(u);

  Matrix an = k.transpose() * g;
  Vector a(d);
  for (std::size_t i = 0; i < d; ++i) {
    a[i] = an(i, i);
    if (!(a[i] > 0)) throw DegeneracyError("non-positive diagonal in Iwasawa decomposition");
  }

  Matrix nn(n, n);
  Matrix nblk(d, d), mblk(d, d);
  for (std::size_t i = 0; i < d; ++i) {
    nblk(i, i) = 1.0;
    for (std::size_t j = i + 1; j < d; ++j) nblk(i, j) = an(i, j) / a[i];
    for (std::size_t j = 0; j < d; ++j) mblk(i, j) = an(i, j + d) / a[i];
  }
  // enforce N^-1 M symmetric exactly
  Matrix ninv = inverse(nblk);
  Matrix s = ninv * mblk;
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = i + 1; j < d; ++j) s(i, j) = s(j, i) = 0.5 * (s(i, j) + s(j, i));
  mblk = nblk * s;
  Matrix ninvt = ninv.transpose();
  nn.set_block(0, 0, nblk);
  nn.set_block(0, d, mblk);
  nn.set_block(d, d, ninvt);

  return {SymplecticMatrix::unchecked(std::move(k)), std::move(a), SymplecticMatrix::unchecked(std::move(nn))};
}

bool is_unipotent(const Matrix& n, double tol) {
  require_even_square(n.rows(), n.cols());
  const std::size_t d = n.rows() / 2;
  for (std::size_t i = 0; i < d; ++i) {
    if (std::abs(n(i, i) - 1.0) > tol) return false;
    for (std::size_t j = 0; j < i; ++j)
      if (std::abs(n(i, j)) > tol) return false;
    for (std::size_t j = 0; j < d; ++j)
      if (std::abs(n(i + d, j)) > tol) return false;
  }
  Matrix nb = n.block(0, 0, d, d), mb = n.block(0, d, d, d);
  if ((nb * mb.transpose() - mb * nb.transpose()).max_abs() > tol * std::max(1.0, n.max_abs() * n.max_abs()))
    return false;
  Matrix lower = n.block(d, d, d, d);
  return relative_residual(lower * nb.transpose(), Matrix::identity(d)) <= tol * std::max(1.0, n.max_abs());
}

Matrix read_matrix_text(std::istream& in) {
  std::string line;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") != std::string::npos) break;
  }
  const auto eq = line.find('=');
  if (eq == std::string::npos || line.substr(0, line.find_first_of(" =")).find('d') == std::string::npos)
    throw ValidationError("matrix text must start with a line 'd=<int>'", "lattice");
  int d = 0;
  try {
    d = std::stoi(line.substr(eq + 1));
  } catch (const std::exception&) {
    throw ValidationError("bad dimension line '" + line + "'", "lattice");
  }
  if (d < 1 || d > 8) throw ValidationError("matrix dimension d must be in [1, 8]", "lattice");
  const std::size_t n = 2 * d;
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (!(in >> m(i, j))) throw ValidationError("matrix text ended early or has a bad entry", "lattice");
  return m;
}

void write_matrix_text(std::ostream& out, const Matrix& m) {
  out << "d=" << m.rows() / 2 << '\n';
  std::ostringstream os;
  os << std::setprecision(17);
  for (std::size_t i = 0; i < m.rows(); ++i) {
    for (std::size_t j = 0; j < m.cols(); ++j) os << (j ? " " : "") << m(i, j);
    os << '\n';
  }
  out << os.str();
}

}  // namespace symplattice
