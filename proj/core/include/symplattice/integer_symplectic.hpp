#pragma once

#include "symplattice/matrix.hpp"
#include "symplattice/rng.hpp"
#include "symplattice/symplectic.hpp"

namespace symplattice {

// M = B U with M^T J M = J exactly and U in GL(2d, Z).
struct ExtractionResult {
  IntegerSymplecticMatrix M;
  IntMatrix U;
};

ExtractionResult extract_symplectic_basis(const IntMatrix& B);

struct RealExtractionResult {
  Matrix M;
  IntMatrix U;
};

// Real basis of a lattice whose pairing B^T J B is integral up to `tol`.
RealExtractionResult extract_symplectic_basis(const Matrix& B, double tol = 1e-9);

Integer content(const IntVector& v);  // gcd of the entries

// Unimodular A with A e_1 = v (v primitive).
IntMatrix unimodular_completion(const IntVector& v);

// gamma in Sp(2d, Z) with gamma e_1 = v0 exactly.
IntegerSymplecticMatrix complete_primitive(const IntVector& v0);

// Product of `count` integer symplectic transvections x -> x + c w(v, x) v.
IntMatrix random_integer_symplectic(int d, Rng& rng, int count = 10, int entry_bound = 2);

// Product of `ops` elementary integer column operations, determinant +-1.
IntMatrix random_unimodular(int n, Rng& rng, int ops = 12);

}  // namespace symplattice
