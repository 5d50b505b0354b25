#include <doctest.h>

#include <cmath>
#include <numbers>

#include "symplattice/error.hpp"
#include "symplattice/haar.hpp"
#include "symplattice/statistics.hpp"

using namespace symplattice;

TEST_CASE("Haar K samples") {
  Rng rng(1);
  for (int d = 1; d <= 4; ++d) {
    const int n = 10000;
    std::vector<double> first(n), first_sq(n);
    for (int t = 0; t < n; ++t) {
      const Matrix k = sample_orthogonal_symplectic(d, rng).matrix();
      if (t < 100) CHECK(is_orthogonal_symplectic(k, 1e-10));
      first[t] = k(0, 2 * d - 1);
      first_sq[t] = first[t] * first[t];
    }
    INFO("d=" << d);
    CHECK(std::abs(mean(first)) <= 4.0 / std::sqrt(n));
    CHECK(std::abs(mean(first_sq) - 1.0 / (2 * d)) <= 5 * standard_error(first_sq));
  }
}

TEST_CASE("haar_density_an") {
  CHECK(haar_density_an({3.0}) == 3.0);
  CHECK(haar_density_an({2.0, 5.0}) == doctest::Approx(8.0 * 5.0));
  CHECK(haar_density_an({1, 1, 1}) == 1.0);
  CHECK_THROWS_AS(haar_density_an({1, 0}), ValidationError);
}

TEST_CASE("chain config validation names the key") {
  ChainConfig c;
  c.step_scale = 0;
  try {
    c.validate();
    FAIL("expected a validation error");
  } catch (const ValidationError& e) {
    CHECK(e.key() == "sampler.eps");
  }
  c = ChainConfig{};
  c.gap = 0;
  CHECK_THROWS_AS(c.validate(), ValidationError);
  c = ChainConfig{};
  c.dim_d = 2;
  c.kind = SamplerKind::exact_modular;
  CHECK_THROWS_AS(c.validate(), ValidationError);
  CHECK(parse_sampler_kind("siegel-biased") == SamplerKind::siegel_biased);
  CHECK_THROWS_AS(parse_sampler_kind("gibbs"), ValidationError);
}

TEST_CASE("chain is deterministic and stays symplectic") {
  ChainConfig c;
  c.dim_d = 2;
  c.seed = 99;
  ChainSampler a(c, 1), b(c, 3);
  const auto la = a.draw(40), lb = b.draw(40);
  for (std::size_t i = 0; i < la.size(); ++i) {
    CHECK(la[i].basis() == lb[i].basis());
    CHECK(is_symplectic(la[i].basis(), 1e-8));
  }
  c.seed = 100;
  ChainSampler other(c, 1);
  CHECK_FALSE(other.draw(1)[0].basis() == la[0].basis());
}

TEST_CASE("calibration") {
  SUBCASE("constant sampler is degenerate") {
    ConstantSampler z(Lattice::standard(1));
    const MvtCalibration m = calibrate_mvt(z, DomainSpec(1, 2.0), 100);
    CHECK(m.degenerate);
    CHECK(m.stderr_ == 0.0);
    CHECK(std::isnan(m.z_score));
    CHECK_THROWS_AS(calibrate_mvt(z, DomainSpec(1, 2.0), 99), ValidationError);
  }
  SUBCASE("exact modular sampler at d = 1") {
    ExactModularSampler s(5);
    const MvtCalibration m = calibrate_mvt(s, DomainSpec(1, 2.0), 20000);
    CHECK(m.target_volume == doctest::Approx(4 * std::log(2.0)));
    CHECK(std::abs(m.z_score) <= 4);
  }
  SUBCASE("chain sampler at d = 1") {
    ChainConfig c;
    c.seed = 12;
    const MvtCalibration m = calibrate_mvt(c, DomainSpec(1, 2.0), 5000, 1);
    CHECK(std::abs(m.z_score) <= 4);
  }
  SUBCASE("the Siegel-set sampler is visibly biased at d = 2") {
    ChainConfig c;
    c.dim_d = 2;
    c.seed = 3;
    c.kind = SamplerKind::siegel_biased;
    const MvtCalibration m = calibrate_mvt(c, DomainSpec(2, 2.0), 20000, 1);
    MESSAGE("siegel-biased z at d = 2: " << m.z_score);
    CHECK(std::abs(m.z_score) > 4);
  }
}

TEST_CASE("pushing samples by a fresh K element does not change count statistics") {
  ChainConfig c;
  c.seed = 8;
  const DomainSpec o2(1, 2.0);
  ChainSampler s(c, 1);
  const auto lats = s.draw(10000);
  Rng rng(77);
  std::vector<double> plain(lats.size()), pushed(lats.size());
  for (std::size_t i = 0; i < lats.size(); ++i) {
    plain[i] = static_cast<double>(count_points(lats[i], o2, CountMode::direct).count);
    const SymplecticMatrix k = sample_orthogonal_symplectic(1, rng);
    const Lattice kl(SymplecticMatrix::unchecked(k.matrix() * lats[i].basis()));
    pushed[i] = static_cast<double>(count_points(kl, o2, CountMode::direct).count);
  }
  CHECK(ks_two_sample(plain, pushed) <= 0.05);
}
