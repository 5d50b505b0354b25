#include "symplattice/integer_symplectic.hpp"

#include <cmath>
#include <sstream>

#include "symplattice/error.hpp"

namespace symplattice {

namespace {

Integer pair(const IntMatrix& P, const IntVector& u, const IntVector& v) {
  Integer s = 0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    if (u[i] == 0) continue;
    Integer row = 0;
    for (std::size_t j = 0; j < v.size(); ++j)
      if (v[j] != 0 && P(i, j) != 0) row += P(i, j) * v[j];
    s += u[i] * row;
  }
  return s;
}

// a -= q b
void sub_mul(IntVector& a, const Integer& q, const IntVector& b) {
  if (q == 0) return;
  for (std::size_t i = 0; i < a.size(); ++i) a[i] -= q * b[i];
}

IntMatrix pairing_matrix(const IntMatrix& B) {
  return B.transpose() * standard_j_exact(static_cast<int>(B.rows() / 2)) * B;
}

[[noreturn]] void not_symplectic(const char* why) {
  throw ValidationError(std::string("not a symplectic lattice: ") + why);
}

// Pull the pair (e, f) out of the pool and clear every remaining vector
// against it, so that the rest pairs trivially with both.
void clear_against(const IntMatrix& P, std::vector<IntVector>& pool, const IntVector& e, const IntVector& f) {
  for (auto& w : pool) {
    const Integer a = pair(P, w, f);
    const Integer b = pair(P, e, w);
    sub_mul(w, a, e);
    sub_mul(w, b, f);
  }
}

// Symplectic basis of the lattice with pairing P, as coefficient columns.
// The pool holds coefficient vectors of a basis; with fixed_first the
// first pool vector is kept as e_1.
IntMatrix darboux(const IntMatrix& P, std::vector<IntVector> pool, bool fixed_first) {
  const std::size_t n = pool.size(), d = n / 2;
  IntMatrix U(n, n);
  for (std::size_t i = 0; i < d; ++i) {
    IntVector e, f;
    if (i == 0 && fixed_first) {
      e = pool.front();
      pool.erase(pool.begin());
      // Euclid on the values w(e, w) over the pool
      std::size_t r = 0;
      for (;;) {
        std::vector<Integer> val(pool.size());
        bool any = false;
        for (std::size_t s = 0; s < pool.size(); ++s) {
          val[s] = pair(P, e, pool[s]);
          if (val[s] != 0 && (!any || abs(val[s]) < abs(val[r]))) {
            r = s;
            any = true;
          }
        }
        if (!any) not_symplectic("vector pairs trivially with the lattice");
        bool reduced = false;
        for (std::size_t s = 0; s < pool.size(); ++s) {
          if (s == r || val[s] == 0) continue;
          const Integer q = val[s] / val[r];
          sub_mul(pool[s], q, pool[r]);
          if (val[s] - q * val[r] != 0) reduced = true;
        }
        if (!reduced) {
          if (abs(val[r]) != 1) not_symplectic("pairing has an elementary divisor above 1");
          if (val[r] < 0)
            for (auto& x : pool[r]) x = -x;
          break;
        }
      }
      f = pool[r];
      pool.erase(pool.begin() + r);
    } else {
      for (;;) {
        std::size_t p = 0, q = 0;
        Integer best = 0;
        for (std::size_t a = 0; a < pool.size(); ++a)
          for (std::size_t b = a + 1; b < pool.size(); ++b) {
            const Integer v = pair(P, pool[a], pool[b]);
            if (v != 0 && (best == 0 || abs(v) < abs(best))) {
              best = v;
              p = a;
              q = b;
            }
          }
        if (best == 0) not_symplectic("degenerate pairing");
        if (best < 0) {
          std::swap(p, q);
          best = -best;
        }
        e = pool[p];
        f = pool[q];
        bool changed = false;
        for (std::size_t r = 0; r < pool.size(); ++r) {
          if (r == p || r == q) continue;
          const Integer a = pair(P, pool[r], f);
          const Integer b = pair(P, e, pool[r]);
          sub_mul(pool[r], a / best, e);
          sub_mul(pool[r], b / best, f);
          if (a % best != 0 || b % best != 0) changed = true;
        }
        if (!changed) {
          if (best != 1) not_symplectic("pairing has an elementary divisor above 1");
          pool.erase(pool.begin() + std::max(p, q));
          pool.erase(pool.begin() + std::min(p, q));
          break;
        }
      }
    }
    clear_against(P, pool, e, f);
    U.set_column(i, e);
    U.set_column(i + d, f);
  }
  return U;
}

std::vector<IntVector> unit_pool(std::size_t n) {
  std::vector<IntVector> pool(n, IntVector(n));
  for (std::size_t i = 0; i < n; ++i) pool[i][i] = 1;
  return pool;
}

void require_even_square(std::size_t r, std::size_t c) {
  if (r != c || r == 0 || r % 2 != 0) throw ValidationError("basis must be a square matrix of even size");
}

}  // namespace

ExtractionResult extract_symplectic_basis(const IntMatrix& B) {
  require_even_square(B.rows(), B.cols());
  const Integer det = determinant(B);
  if (abs(det) != 1) {
    std::ostringstream os;
    os << "not unimodular: det = " << det;
    throw ValidationError(os.str());
  }
  const IntMatrix P = pairing_matrix(B);
  IntMatrix U = darboux(P, unit_pool(B.rows()), false);
  IntMatrix M = B * U;
  return {IntegerSymplecticMatrix(std::move(M)), std::move(U)};
}

RealExtractionResult extract_symplectic_basis(const Matrix& B, double tol) {
  require_even_square(B.rows(), B.cols());
  const std::size_t n = B.rows();
  const Matrix Pr = B.transpose() * standard_j(static_cast<int>(n / 2)) * B;
  IntMatrix P(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      const double r = std::round(Pr(i, j));
      if (std::abs(Pr(i, j) - r) > tol * std::max(1.0, std::abs(Pr(i, j))))
        throw ValidationError("not a symplectic lattice: pairing is not integral");
      P(i, j) = static_cast<long long>(r);
    }
  // det(B^T J B) = det(B)^2
  if (determinant(P) != 1) throw ValidationError("not unimodular: |det B| != 1");
  IntMatrix U = darboux(P, unit_pool(n), false);
  return {B * U.to_double(), std::move(U)};
}

Integer content(const IntVector& v) {
  Integer g = 0;
  for (const auto& x : v) g = gcd(g, Integer(abs(x)));
  return g;
}

IntMatrix unimodular_completion(const IntVector& v) {
  const std::size_t n = v.size();
  if (content(v) != 1) throw ValidationError("vector is not primitive");
  // Row operations E take v to e_1; A = E^-1 is accumulated as column operations.
  IntVector w = v;
  IntMatrix A = IntMatrix::identity(n);
  for (;;) {
    std::size_t p = n;
    for (std::size_t i = 0; i < n; ++i)
      if (w[i] != 0 && (p == n || abs(w[i]) < abs(w[p]))) p = i;
    bool reduced = false;
    for (std::size_t j = 0; j < n; ++j) {
      if (j == p || w[j] == 0) continue;
      const Integer q = w[j] / w[p];
      // row_j -= q row_p  <=>  A col_p += q A col_j
      w[j] -= q * w[p];
      A.add_column(p, j, q);
      if (w[j] != 0) reduced = true;
    }
    if (!reduced) {
      if (p != 0) {
        std::swap(w[0], w[p]);
        A.swap_columns(0, p);
      }
      if (w[0] < 0) {
        w[0] = -w[0];
        A.negate_column(0);
      }
      break;
    }
  }
  return A;
}

IntegerSymplecticMatrix complete_primitive(const IntVector& v0) {
  if (v0.empty() || v0.size() % 2 != 0) throw ValidationError("vector length must be 2d");
  const Integer g = content(v0);
  if (g != 1) {
    std::ostringstream os;
    os << "vector is not primitive: gcd = " << g;
    throw ValidationError(os.str());
  }
  const IntMatrix A = unimodular_completion(v0);
  const IntMatrix U = darboux(pairing_matrix(A), unit_pool(v0.size()), true);
  return IntegerSymplecticMatrix(A * U);
}

IntMatrix random_integer_symplectic(int d, Rng& rng, int count, int entry_bound) {
  const std::size_t n = 2 * d;
  const IntMatrix J = standard_j_exact(d);
  IntMatrix g = IntMatrix::identity(n);
  for (int t = 0; t < count; ++t) {
    IntVector v(n);
    bool nonzero = false;
    while (!nonzero)
      for (auto& x : v) {
        x = static_cast<long long>(rng.below(2 * entry_bound + 1)) - entry_bound;
        nonzero = nonzero || x != 0;
      }
    const long long c = rng.below(2) ? 1 : -1;
    // T = I + c v v^T J
    IntVector vj(n);
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t k = 0; k < n; ++k) vj[j] += v[k] * J(k, j);
    IntMatrix T = IntMatrix::identity(n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) T(i, j) += c * v[i] * vj[j];
    g = g * T;
  }
  return g;
}

IntMatrix random_unimodular(int n, Rng& rng, int ops) {
  IntMatrix A = IntMatrix::identity(n);
  for (int t = 0; t < ops; ++t) {
    const std::size_t a = rng.below(n);
    std::size_t b = rng.below(n);
    if (n > 1)
      while (b == a) b = rng.below(n);
    switch (rng.below(4)) {
      case 0:
        A.swap_columns(a, b);
        break;
      case 1:
        A.negate_column(a);
        break;
      default:
        if (a != b) A.add_column(a, b, static_cast<long long>(rng.below(5)) - 2);
    }
  }
  return A;
}

}  // namespace symplattice
