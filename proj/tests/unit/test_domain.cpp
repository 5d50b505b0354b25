#include <doctest.h>

#include <cmath>
#include <numbers>

#include "helpers.hpp"
#include "symplattice/domain.hpp"
#include "symplattice/error.hpp"

using namespace symplattice;

TEST_CASE("membership boundary conventions") {
  const DomainSpec s(1, 2.0);
  CHECK(contains(s, {1, 1}));
  CHECK_FALSE(contains(s, {1, 2}));
  CHECK_FALSE(contains(s, {3, 1}));
  CHECK(contains(s, {2, 1}));  // product bound closed
  CHECK_THROWS_AS(contains(s, {1, 1, 1, 1}), ValidationError);
}

TEST_CASE("spec validation") {
  CHECK_THROWS_AS(DomainSpec(1, 1.0).validate(), ValidationError);
  CHECK_THROWS_AS(DomainSpec(1, 2.0, 2.0, 1.0).validate(), ValidationError);
  CHECK_THROWS_AS(volume(DomainSpec(2, 0.5)), ValidationError);
}

TEST_CASE("volume formula") {
  CHECK(volume(DomainSpec(1, std::exp(1.0))) == doctest::Approx(4.0).epsilon(1e-14));
  CHECK(volume(DomainSpec(2, 2.0)) == doctest::Approx(6 * std::numbers::pi * std::numbers::pi * std::log(2.0)));
  CHECK(volume(DomainSpec(2, 2.0)) == doctest::Approx(41.04653).epsilon(1e-6));
  for (int d = 1; d <= 6; ++d)
    CHECK(volume(DomainSpec(d, 9.0)) / volume(DomainSpec(d, 3.0)) == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(sphere_constant(2) == doctest::Approx(2 * std::numbers::pi));
  CHECK(unit_ball_volume(2) == doctest::Approx(std::numbers::pi));
}

TEST_CASE("volume Monte Carlo agrees with the closed form") {
  for (int d = 1; d <= 3; ++d)
    for (double T : {2.0, 4.0, 16.0}) {
      const DomainSpec s(d, T);
      const McEstimate e = volume_monte_carlo(s, 200000, 17 + d);
      INFO("d=" << d << " T=" << T);
      CHECK(std::abs(e.estimate - volume(s)) <= 3 * e.stderr_);
    }
  const McEstimate a = volume_monte_carlo(DomainSpec(2, 2.0), 10000, 5);
  const McEstimate b = volume_monte_carlo(DomainSpec(2, 2.0), 10000, 5);
  CHECK(a.estimate == b.estimate);
  CHECK(a.stderr_ == b.stderr_);
}

TEST_CASE("symmetries of the domain") {
  Rng rng(3);
  for (int d = 1; d <= 3; ++d) {
    const DomainSpec s(d, 8.0);
    for (int t = 0; t < 2000; ++t) {
      Vector v(2 * d);
      for (auto& x : v) x = rng.uniform(-3, 3);
      Vector neg = v;
      for (auto& x : neg) x = -x;
      CHECK(contains(s, v) == contains(s, neg));
      // rotate x and y blocks independently; only the two norms matter
      Vector x(v.begin(), v.begin() + d), y(v.begin() + d, v.end());
      const double nx = norm(x), ny = norm(y);
      Vector w(2 * d, 0.0);
      w[0] = nx;
      w[d] = ny;
      CHECK(contains(s, v) == contains(s, w));
    }
  }
}

TEST_CASE("tiles partition Omega_{2^N}") {
  CHECK(tile_membership(TileIndex(1, 2), {1, 2}));
  CHECK_FALSE(tile_membership(TileIndex(0, 2), {1, 2}));
  CHECK_THROWS_AS(TileIndex(3, 3), ValidationError);
  Rng rng(9);
  for (int d = 1; d <= 3; ++d) {
    const int N = 5;
    const DomainSpec big = domain_pow2(d, N);
    int inside = 0;
    for (int t = 0; t < 10000; ++t) {
      // sample |y| log-uniform in [1/2, 2^{N+1}) and |x||y| in [1/2, 3] in random directions
      Vector v(2 * d);
      for (auto& x : v) x = rng.normal();
      Vector x(v.begin(), v.begin() + d), y(v.begin() + d, v.end());
      const double ry = std::exp2(rng.uniform(-1.0, N + 1.0)), rxy = rng.uniform(0.5, 3.0);
      const double sx = rxy / ry / norm(x), sy = ry / norm(y);
      for (int i = 0; i < d; ++i) {
        v[i] *= sx;
        v[i + d] *= sy;
      }
      int claims = 0;
      for (int m = 0; m < N; ++m) claims += tile_membership(TileIndex(m, N), v);
      const bool in = contains(big, v);
      inside += in;
      CHECK(claims == (in ? 1 : 0));
      CHECK(tile_membership(TileIndex(0, N), v) == contains(DomainSpec(d, 2.0), v));
    }
    CHECK(inside > 1000);
  }
}
