#pragma once

#include <cmath>
#include <cstdint>

#include "symplattice/lattice.hpp"
#include "symplattice/matrix.hpp"
#include "symplattice/symplectic.hpp"

namespace symplattice {

// t = 2/sqrt(3)
inline const double kSiegelT = 2.0 / std::sqrt(3.0);

// m(1) = 2, m(d) = d * 2(d-1) * m(d-1)
std::int64_t m_bound(int d);

// (N, M; 0, N^-T) with N unit upper triangular and N M^T = M N^T
struct UnipotentElement {
  Matrix N;
  Matrix M;

  static UnipotentElement from_matrix(const Matrix& n, double tol = kSymplecticTol);
  int dim_d() const { return static_cast<int>(N.rows()); }
  Matrix assemble() const;
};

struct UnipotentReduction {
  IntMatrix S;  // unit upper triangular
  IntMatrix T;  // S T^T = T S^T
  UnipotentElement n_reduced;

  // (S, T; 0, S^-T)
  IntMatrix assemble() const;
};

// n_reduced = n (S, T; 0, S^-T) with |NS|, |(NS)^-1|, |NT + M S^-T| all <= m(d)
UnipotentReduction reduce_unipotent(const UnipotentElement& n);

// a_i <= t a_{i+1} for i < d and a_d <= t
bool in_siegel_a(const Vector& a, double t = kSiegelT);

// g = k diag(a, 1/a) n gamma
struct SiegelCoordinates {
  SymplecticMatrix k;
  Vector a;
  UnipotentElement n;
  IntegerSymplecticMatrix gamma;

  Matrix kan() const;
  Matrix reconstruct() const;
};

SiegelCoordinates siegel_reduce(const SymplecticMatrix& g, std::uint64_t node_budget = kDefaultNodeBudget);

}  // namespace symplattice
