#include <doctest.h>

#include <cmath>

#include "helpers.hpp"
#include "symplattice/integer_symplectic.hpp"
#include "symplattice/siegel.hpp"

using namespace symplattice;

namespace {

double max_abs_entry(const Matrix& m) { return m.max_abs(); }

// remove rows and columns 0 and d
Matrix central_block(const Matrix& g) {
  const std::size_t n = g.rows(), d = n / 2;
  Matrix out(n - 2, n - 2);
  std::size_t oi = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (i == 0 || i == d) continue;
    std::size_t oj = 0;
    for (std::size_t j = 0; j < n; ++j) {
      if (j == 0 || j == d) continue;
      out(oi, oj++) = g(i, j);
    }
    ++oi;
  }
  return out;
}

void check_reduction(const Matrix& g, const SiegelCoordinates& sc) {
  const int d = static_cast<int>(g.rows() / 2);
  CHECK(in_siegel_a(sc.a));
  for (int i = 0; i < d; ++i) CHECK(sc.a[i] <= std::pow(kSiegelT, d - i) * (1 + 1e-12));
  CHECK(max_abs_entry(sc.n.assemble()) <= static_cast<double>(m_bound(d)) + 1e-9);
  CHECK(is_symplectic(sc.gamma.matrix()));
  CHECK(relative_residual(sc.reconstruct(), g) <= 1e-6);
  CHECK(is_orthogonal_symplectic(sc.k.matrix(), 1e-8));
}

}  // namespace

TEST_CASE("m_bound recursion") {
  CHECK(m_bound(1) == 2);
  CHECK(m_bound(2) == 8);
  CHECK(m_bound(3) == 96);
  CHECK(m_bound(4) == 4 * 6 * 96);
}

TEST_CASE("reduce_unipotent") {
  {
    UnipotentElement n{Matrix{{1}}, Matrix{{7.3}}};
    const auto r = reduce_unipotent(n);
    CHECK(r.T(0, 0) == -7);
    CHECK(r.n_reduced.M(0, 0) == doctest::Approx(0.3));
  }
  {
    // already within bounds
    UnipotentElement n{Matrix{{1, 0.5}, {0, 1}}, Matrix{{0.2, 0.1}, {0.1, -0.3}}};
    n.M = n.N * Matrix{{0.2, 0.1}, {0.1, -0.3}};
    const auto r = reduce_unipotent(n);
    CHECK(r.n_reduced.assemble().max_abs() <= 8);
  }
  Rng rng(13);
  for (int d = 1; d <= 3; ++d)
    for (int t = 0; t < 200; ++t) {
      const Matrix big = testing::random_unipotent(d, rng, 100.0);
      const UnipotentElement n = UnipotentElement::from_matrix(big, 1e-6);
      const auto r = reduce_unipotent(n);
      const double mb = static_cast<double>(m_bound(d));
      const Matrix NS = r.n_reduced.N;
      CHECK(NS.max_abs() <= mb + 1e-9);
      CHECK(inverse(NS).max_abs() <= mb + 1e-6);
      CHECK(r.n_reduced.M.max_abs() <= mb + 1e-6);
      const IntMatrix st = r.S * r.T.transpose(), ts = r.T * r.S.transpose();
      CHECK(st == ts);
      CHECK(relative_residual(n.assemble() * r.assemble().to_double(), r.n_reduced.assemble()) < 1e-7);
    }
}

TEST_CASE("siegel_reduce examples") {
  {
    const auto sc = siegel_reduce(SymplecticMatrix(Matrix::identity(4)));
    CHECK(sc.a == Vector{1, 1});
    CHECK(relative_residual(sc.n.assemble(), Matrix::identity(4)) < 1e-12);
    CHECK(sc.gamma.matrix() == IntMatrix::identity(4));
  }
  {
    const Matrix g{{10, 0}, {0, 0.1}};
    const auto sc = siegel_reduce(SymplecticMatrix(g));
    CHECK(sc.a[0] == doctest::Approx(0.1));
    CHECK(sc.gamma.matrix()(0, 0) == 0);
    CHECK(boost::multiprecision::abs(sc.gamma.matrix()(1, 0)) == 1);
    check_reduction(g, sc);
  }
}

TEST_CASE("siegel_reduce postconditions, idempotence and projection") {
  Rng rng(77);
  for (int d = 1; d <= 3; ++d)
    for (int t = 0; t < 150; ++t) {
      const Matrix g = testing::random_kan(d, rng, 3.0, 2.0);
      const auto sc = siegel_reduce(SymplecticMatrix(g, 1e-7));
      INFO("d=" << d << " t=" << t);
      check_reduction(g, sc);
      const auto again = siegel_reduce(SymplecticMatrix::unchecked(sc.kan()));
      for (int i = 0; i < d; ++i) CHECK(std::abs(std::log(again.a[i] / sc.a[i])) <= 1e-8);
      if (d > 1) CHECK(is_symplectic(central_block(sc.n.assemble()), 1e-8));
    }
}
