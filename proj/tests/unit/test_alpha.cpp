#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "helpers.hpp"
#include "symplattice/alpha.hpp"
#include "symplattice/error.hpp"
#include "symplattice/haar.hpp"
#include "symplattice/siegel.hpp"

using namespace symplattice;

TEST_CASE("alpha_diag examples") {
  CHECK(alpha_diag({1, 1, 1}) == 1.0);
  CHECK(alpha_diag({2}) == doctest::Approx(2.0));
  CHECK(alpha_diag({3, 1}) == doctest::Approx(3.0));
  CHECK_THROWS_AS(alpha_diag({1, 0}), ValidationError);
  CHECK_THROWS_AS(alpha_diag({-1}), ValidationError);
}

TEST_CASE("hermite constants and Gram covolume") {
  CHECK(hermite_power(1) == 1.0);
  CHECK(hermite_power(2) == doctest::Approx(4.0 / 3.0));
  CHECK(hermite_power(8) == doctest::Approx(256.0));
  CHECK(gram_covolume({{3, 0}, {0, 2}}) == doctest::Approx(6.0));
  CHECK(gram_covolume({{1, 1}, {2, 2}}) == 0.0);
}

TEST_CASE("alpha_search on the standard lattice") {
  for (int d = 1; d <= 2; ++d) {
    const AlphaResult r = alpha_search(Lattice::standard(d), 2.0);
    CHECK(r.value == doctest::Approx(1.0));
    CHECK(r.certified);
    CHECK(r.rank_covolumes.size() == static_cast<std::size_t>(2 * d));
  }
}

TEST_CASE("alpha_search matches alpha_diag on diagonal lattices") {
  Rng rng(101);
  for (int t = 0; t < 100; ++t) {
    const int d = 1 + static_cast<int>(rng.below(3));
    Vector a(d);
    for (auto& x : a) x = std::exp(rng.uniform(-1.5, 1.5));
    const AlphaResult r = alpha_search(diag_a(a), 50.0);
    INFO("d=" << d);
    CHECK(r.certified);
    CHECK(std::abs(r.value - alpha_diag(a)) <= 1e-10 * alpha_diag(a));
    CHECK(r.value == doctest::Approx(1.0 / gram_covolume(r.witness_vectors)).epsilon(1e-12));
  }
}

TEST_CASE("alpha invariants on random lattices") {
  Rng rng(55);
  double worst_ratio = 0;
  for (int d = 1; d <= 2; ++d)
    for (int t = 0; t < 40; ++t) {
      const Matrix g = testing::random_kan(d, rng, 1.0, 1.0);
      const AlphaResult r = alpha_search(g, 50.0);
      CHECK(r.certified);
      CHECK(r.value >= 1.0 - 1e-12);
      CHECK(r.value >= 1.0 / shortest_vector(g).norm - 1e-12);

      const Matrix kg = sample_orthogonal_symplectic(d, rng).matrix() * g;
      CHECK(std::abs(alpha_search(kg, 50.0).value - r.value) <= 1e-10 * r.value);

      const AlphaResult small = alpha_search(g, 0.8);
      CHECK(small.value <= r.value + 1e-12);

      // bounded ratio against the A-part of a Siegel reduction
      const SiegelCoordinates sc = siegel_reduce(SymplecticMatrix(g, 1e-7));
      worst_ratio = std::max(worst_ratio, r.value / alpha_diag(sc.a));
    }
  MESSAGE("max alpha(g) / alpha(a) over the corpus: " << worst_ratio);
  CHECK(std::isfinite(worst_ratio));
  CHECK(worst_ratio < 100.0);
}

TEST_CASE("tail statistics") {
  SUBCASE("constant sampler on the standard lattice has an empty tail") {
    ConstantSampler z(Lattice::standard(2));
    const TailStats t = alpha_tail_stats(z, {2, 5, 20}, 200, 1, 1);
    CHECK(t.empty_tail);
    for (const auto& row : t.rows) CHECK(row.survival == 0.0);
  }
  SUBCASE("grid validation") {
    const std::vector<double> alphas = {1, 2, 3};
    CHECK_THROWS_AS(alpha_tail_stats(alphas, {5}, 1), ValidationError);
    CHECK_THROWS_AS(alpha_tail_stats(alphas, {5, 4, 60}, 1), ValidationError);
    CHECK_THROWS_AS(alpha_tail_stats(alphas, {5, 20}, 1), ValidationError);
  }
  SUBCASE("synthetic Pareto tail recovers its exponent") {
    Rng rng(3);
    std::vector<double> alphas(200000);
    for (auto& a : alphas) a = std::pow(rng.uniform_pos(), -1.0 / 2.5);  // P(alpha >= L) = L^-2.5
    const TailStats t = alpha_tail_stats(alphas, {2, 4, 8, 16, 32}, 7);
    CHECK(t.slope == doctest::Approx(-2.5).epsilon(0.05));
    CHECK(t.slope_ci_lo <= -2.5);
    CHECK(t.slope_ci_hi >= -2.5);
    for (const auto& row : t.rows) {
      CHECK(row.ci_lo <= row.survival);
      CHECK(row.survival <= row.ci_hi);
    }
  }
}
