#pragma once

#include <cmath>

#include "symplattice/haar.hpp"
#include "symplattice/matrix.hpp"
#include "symplattice/rng.hpp"
#include "symplattice/symplectic.hpp"

namespace symplattice::testing {

// Random unipotent (N, M; 0, N^-T) with entries of N, S uniform in [-w, w], M = N S, S symmetric.
inline Matrix random_unipotent(int d, Rng& rng, double w) {
  const std::size_t n = static_cast<std::size_t>(d);
  Matrix N = Matrix::identity(n), S(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i; j < n; ++j) {
      if (j > i) N(i, j) = rng.uniform(-w, w);
      S(i, j) = S(j, i) = rng.uniform(-w, w);
    }
  const Matrix M = N * S;
  const Matrix NinvT = inverse(N).transpose();
  Matrix g(2 * n, 2 * n);
  g.set_block(0, 0, N);
  g.set_block(0, n, M);
  g.set_block(n, n, NinvT);
  return g;
}

// k diag(a, 1/a) n with log a_i uniform in [-spread, spread]
inline Matrix random_kan(int d, Rng& rng, double spread, double n_width = 2.0) {
  Vector a(static_cast<std::size_t>(d));
  for (auto& x : a) x = std::exp(rng.uniform(-spread, spread));
  return sample_orthogonal_symplectic(d, rng).matrix() * diag_a(a) * random_unipotent(d, rng, n_width);
}

}  // namespace symplattice::testing
