#include "symplattice/siegel.hpp"

#include <cmath>

#include "symplattice/error.hpp"
#include "symplattice/integer_symplectic.hpp"

namespace symplattice {

std::int64_t m_bound(int d) {
  if (d < 1 || d > 8) throw ValidationError("m_bound needs 1 <= d <= 8", "d");
  std::int64_t m = 2;
  for (int k = 2; k <= d; ++k) m = static_cast<std::int64_t>(k) * 2 * (k - 1) * m;
  return m;
}

UnipotentElement UnipotentElement::from_matrix(const Matrix& n, double tol) {
  if (!is_unipotent(n, tol)) throw ValidationError("matrix is not in N(d)");
  const std::size_t d = n.rows() / 2;
  return {n.block(0, 0, d, d), n.block(0, d, d, d)};
}

Matrix UnipotentElement::assemble() const {
  const std::size_t d = N.rows();
  Matrix n(2 * d, 2 * d);
  n.set_block(0, 0, N);
  n.set_block(0, d, M);
  n.set_block(d, d, inverse(N).transpose());
  return n;
}

namespace {

// S with NS bounded, by the shear recursion on the leading (d-1) block
IntMatrix reduce_n_block(const Matrix& N) {
  const std::size_t d = N.rows();
  IntMatrix S = IntMatrix::identity(d);
  if (d == 1) return S;
  const IntMatrix S0 = reduce_n_block(N.block(0, 0, d - 1, d - 1));
  for (std::size_t i = 0; i + 1 < d; ++i)
    for (std::size_t j = 0; j + 1 < d; ++j) S(i, j) = S0(i, j);
  // s with |A s + x|_max <= 1/2 by back-substitution on the unit triangle A
  std::vector<double> s(d - 1, 0.0);
  for (std::size_t i = d - 1; i-- > 0;) {
    double acc = N(i, d - 1);
    for (std::size_t j = i + 1; j + 1 < d; ++j) acc += N(i, j) * s[j];
    s[i] = -std::round(acc);
  }
  for (std::size_t i = 0; i + 1 < d; ++i) S(i, d - 1) = static_cast<long long>(s[i]);
  return S;
}

// exact inverse of a unit upper triangular integer matrix
IntMatrix unit_upper_inverse(const IntMatrix& S) {
  const std::size_t d = S.rows();
  IntMatrix R = IntMatrix::identity(d);
  for (std::size_t c = 0; c < d; ++c)
    for (std::size_t i = c; i-- > 0;) {
      Integer acc = 0;
      for (std::size_t j = i + 1; j <= c; ++j) acc += S(i, j) * R(j, c);
      R(i, c) = -acc;
    }
  return R;
}

}  // namespace

IntMatrix UnipotentReduction::assemble() const {
  const std::size_t d = S.rows();
  IntMatrix g(2 * d, 2 * d);
  const IntMatrix sit = unit_upper_inverse(S).transpose();
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < d; ++j) {
      g(i, j) = S(i, j);
      g(i, j + d) = T(i, j);
      g(i + d, j + d) = sit(i, j);
    }
  return g;
}

UnipotentReduction reduce_unipotent(const UnipotentElement& n) {
  const std::size_t d = n.N.rows();
  UnipotentReduction r;
  r.S = reduce_n_block(n.N);
  const Matrix Sd = r.S.to_double();
  const Matrix Sit = unit_upper_inverse(r.S).transpose().to_double();
  // T' = 0; T'' = nearest integer to -(N')^-1 M', symmetrised first
  const Matrix Np = n.N * Sd;
  const Matrix Mp = n.M * Sit;
  Matrix X = inverse(Np) * Mp;
  IntMatrix T2(d, d);
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < d; ++j)
      T2(i, j) = static_cast<long long>(std::round(-0.5 * (X(i, j) + X(j, i))));
  r.T = r.S * T2;
  const Matrix T2d = T2.to_double();
  r.n_reduced.N = Np;
  r.n_reduced.M = Np * T2d + Mp;
  return r;
}

bool in_siegel_a(const Vector& a, double t) {
  const std::size_t d = a.size();
  for (std::size_t i = 0; i + 1 < d; ++i)
    if (!(a[i] <= t * a[i + 1])) return false;
  return d > 0 && a[d - 1] <= t;
}

Matrix SiegelCoordinates::kan() const { return k.matrix() * diag_a(a) * n.assemble(); }

Matrix SiegelCoordinates::reconstruct() const { return kan() * gamma.to_double(); }

namespace {

bool is_identity(const IntMatrix& m) { return m == IntMatrix::identity(m.rows()); }

// Right-multiply gamma by integer shears (S, T; 0, S^-T) until the N-part of
// h gamma is reduced. Shears fix e_1 and leave the A-part alone; they only
// keep h gamma well conditioned so its Iwasawa factors stay accurate.
IwasawaFactors tidy(const Matrix& h, IntMatrix& gamma, UnipotentReduction* last = nullptr) {
  for (int round = 0;; ++round) {
    IwasawaFactors f = iwasawa_decompose(SymplecticMatrix::unchecked(h * gamma.to_double()));
    const std::size_t d = f.a.size();
    UnipotentReduction red =
        reduce_unipotent({f.n.matrix().block(0, 0, d, d), f.n.matrix().block(0, d, d, d)});
    const IntMatrix s = red.assemble();
    gamma = gamma * s;
    if (is_identity(s) || round == 6) {
      if (last) *last = std::move(red);
      return f;
    }
  }
}

// A short symplectic basis of h Z^{2d}: LLL first, then Darboux on the
// reduced vectors. Returns P in Sp(2d, Z); h P is well conditioned, so the
// completions built on top of it stay small. h is symplectic, so the pairing
// of h U is exactly U^T J U and is taken in integers rather than rounded.
IntMatrix precondition(const Matrix& h) {
  const LllResult red = lll_reduce(h);
  const std::size_t n = h.rows();
  IntMatrix U(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) U(i, j) = red.transform[i * n + j];
  return extract_symplectic_basis(U).M.matrix();
}

// Gamma in Sp(2d, Z) such that the A-part of h Gamma lies in A_t.
IntMatrix siegel_gamma(const Matrix& h_in, std::uint64_t budget) {
  const std::size_t n = h_in.rows(), d = n / 2;
  const IntMatrix pre = precondition(h_in);
  const Matrix h = h_in * pre.to_double();
  const ShortestVector sv = shortest_vector(h, budget);
  IntVector v0(n);
  for (std::size_t i = 0; i < n; ++i) v0[i] = sv.coeffs[i];
  IntMatrix g0 = complete_primitive(v0).matrix();
  if (d == 1) return pre * g0;

  const IwasawaFactors f = tidy(h, g0);
  const Matrix an = diag_a(f.a) * f.n.matrix();
  // central Sp(2d-2) block: drop indices 0 and d
  std::vector<std::size_t> idx;
  for (std::size_t i = 1; i < n; ++i)
    if (i != d) idx.push_back(i);
  Matrix inner(n - 2, n - 2);
  for (std::size_t i = 0; i < idx.size(); ++i)
    for (std::size_t j = 0; j < idx.size(); ++j) inner(i, j) = an(idx[i], idx[j]);
  const IntMatrix g2 = siegel_gamma(inner, budget);
  IntMatrix lift = IntMatrix::identity(n);
  for (std::size_t i = 0; i < idx.size(); ++i)
    for (std::size_t j = 0; j < idx.size(); ++j) lift(idx[i], idx[j]) = g2(i, j);
  return pre * g0 * lift;
}

}  // namespace

SiegelCoordinates siegel_reduce(const SymplecticMatrix& g, std::uint64_t node_budget) {
  IntMatrix total = siegel_gamma(g.matrix(), node_budget);
  UnipotentReduction red;
  const IwasawaFactors f = tidy(g.matrix(), total, &red);
  return {f.k, f.a, std::move(red.n_reduced), IntegerSymplecticMatrix(symplectic_inverse(total))};
}

}  // namespace symplattice
