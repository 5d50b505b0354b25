#include <doctest.h>

#include <cmath>
#include <sstream>

#include "helpers.hpp"
#include "symplattice/error.hpp"
#include "symplattice/symplectic.hpp"

using namespace symplattice;

TEST_CASE("standard_j blocks and identities") {
  CHECK(standard_j(1) == Matrix{{0, 1}, {-1, 0}});
  CHECK_THROWS_AS(standard_j(0), ValidationError);
  for (int d = 1; d <= 4; ++d) {
    const Matrix J = standard_j(d);
    CHECK(J * J == -1.0 * Matrix::identity(2 * d));
    CHECK(J.transpose() == -1.0 * J);
    CHECK(is_symplectic(standard_j_exact(d)));
  }
}

TEST_CASE("omega") {
  CHECK(omega(Vector{1, 2}, Vector{3, 4}) == -2.0);
  for (int d = 1; d <= 3; ++d) {
    Vector e1(2 * d, 0.0), ed(2 * d, 0.0);
    e1[0] = 1;
    ed[d] = 1;
    CHECK(omega(e1, ed) == 1.0);
    Rng rng(d);
    Vector x(2 * d);
    for (auto& v : x) v = rng.normal();
    CHECK(omega(x, x) == 0.0);
  }
  CHECK_THROWS_AS(omega(Vector{1, 2}, Vector{1, 2, 3, 4}), ValidationError);
  CHECK_THROWS_AS(omega(Vector{1, 2, 3}, Vector{1, 2, 3}), ValidationError);
}

TEST_CASE("is_symplectic") {
  CHECK(is_symplectic(Matrix::identity(4)));
  CHECK(is_symplectic(standard_j(2)));
  CHECK_FALSE(is_symplectic(Matrix::diagonal({2, 1, 1, 1})));
  CHECK_THROWS_AS(is_symplectic(Matrix(3, 3)), ValidationError);
  CHECK_THROWS_AS(is_symplectic(Matrix(2, 4)), ValidationError);
  CHECK_THROWS_AS(SymplecticMatrix(Matrix::diagonal({2, 1})), ValidationError);
}

TEST_CASE("diag_flow") {
  const Matrix b = diag_flow(2, std::log(2.0)).matrix();
  const Matrix want = Matrix::diagonal({2, 2, 0.5, 0.5});
  CHECK(relative_residual(b, want) < 1e-15);
  CHECK(diag_flow(3, 0.0).matrix() == Matrix::identity(6));
  const Matrix ab = (diag_flow(2, 0.3) * diag_flow(2, 0.4)).matrix();
  CHECK(relative_residual(ab, diag_flow(2, 0.7).matrix()) < 1e-14);
}

TEST_CASE("iwasawa examples") {
  {
    auto f = iwasawa_decompose(SymplecticMatrix(Matrix{{2, 0}, {0, 0.5}}));
    CHECK(relative_residual(f.k.matrix(), Matrix::identity(2)) < 1e-12);
    CHECK(f.a[0] == doctest::Approx(2.0));
    CHECK(relative_residual(f.n.matrix(), Matrix::identity(2)) < 1e-12);
  }
  {
    const Matrix g{{1, 1}, {0, 1}};
    auto f = iwasawa_decompose(SymplecticMatrix(g));
    CHECK(relative_residual(f.k.matrix(), Matrix::identity(2)) < 1e-12);
    CHECK(f.a[0] == doctest::Approx(1.0));
    CHECK(relative_residual(f.n.matrix(), g) < 1e-12);
  }
  {
    auto f = iwasawa_decompose(SymplecticMatrix(standard_j(1)));
    CHECK(relative_residual(f.k.matrix(), standard_j(1)) < 1e-12);
    CHECK(f.a[0] == doctest::Approx(1.0));
    CHECK(relative_residual(f.n.matrix(), Matrix::identity(2)) < 1e-12);
  }
}

TEST_CASE("iwasawa round trip, uniqueness and group identities on random g") {
  Rng rng(11);
  for (int d = 1; d <= 4; ++d) {
    double worst_rt = 0, worst_unique = 0, worst_inv = 0, worst_form = 0;
    for (int t = 0; t < 1000; ++t) {
      const Matrix g = testing::random_kan(d, rng, 1.5);
      const SymplecticMatrix gs(g, 1e-8);
      const auto f = iwasawa_decompose(gs);
      CHECK(is_orthogonal_symplectic(f.k.matrix(), 1e-9));
      CHECK(is_unipotent(f.n.matrix(), 1e-8));
      worst_rt = std::max(worst_rt, relative_residual(f.reconstruct(), g));

      const auto f2 = iwasawa_decompose(SymplecticMatrix::unchecked(f.reconstruct()));
      for (int i = 0; i < d; ++i) worst_unique = std::max(worst_unique, std::abs(f2.a[i] / f.a[i] - 1));
      worst_unique = std::max(worst_unique, relative_residual(f2.k.matrix(), f.k.matrix()));

      worst_inv = std::max(worst_inv, relative_residual(gs.inverse().matrix(), inverse(g)));

      Vector x(2 * d), y(2 * d);
      for (auto& v : x) v = rng.normal();
      for (auto& v : y) v = rng.normal();
      const double nx = norm(x), ny = norm(y);
      for (auto& v : x) v /= nx;
      for (auto& v : y) v /= ny;
      worst_form = std::max(worst_form, std::abs(omega(g * x, g * y) - omega(x, y)));
    }
    INFO("d = " << d);
    CHECK(worst_rt <= 1e-8);
    CHECK(worst_unique <= 1e-8);
    CHECK(worst_inv <= 1e-8);
    CHECK(worst_form <= 1e-9);
  }
}

TEST_CASE("iwasawa rejects ill-conditioned input") {
  const double big = 1e7;
  CHECK_THROWS_AS(iwasawa_decompose(SymplecticMatrix(Matrix{{big, 0}, {0, 1 / big}}), 1e12), DegeneracyError);
}

TEST_CASE("unitary model of K") {
  Rng rng(5);
  for (int d = 1; d <= 4; ++d) {
    const SymplecticMatrix k = sample_orthogonal_symplectic(d, rng);
    CHECK(is_orthogonal_symplectic(k.matrix(), 1e-10));
    const Matrix back = unitary_to_symplectic(symplectic_to_unitary(k.matrix()));
    CHECK(relative_residual(back, k.matrix()) < 1e-14);
  }
}

TEST_CASE("matrix text format round trip") {
  const Matrix g = Matrix{{2, 1}, {3, 2}};
  std::stringstream ss;
  write_matrix_text(ss, g);
  CHECK(ss.str().rfind("d=1\n", 0) == 0);
  CHECK(read_matrix_text(ss) == g);
  std::stringstream bad("d=2\n1 0\n0 1\n");
  CHECK_THROWS_AS(read_matrix_text(bad), ValidationError);
}
