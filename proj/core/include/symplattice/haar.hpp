#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "symplattice/domain.hpp"
#include "symplattice/lattice.hpp"
#include "symplattice/rng.hpp"
#include "symplattice/symplectic.hpp"

namespace symplattice {

// Haar-distributed element of K = SO(2d) ∩ Sp(2d,R) via the unitary model.
SymplecticMatrix sample_orthogonal_symplectic(int d, Rng& rng);

// prod a_i^{2(d-i)+1}: density of the right Haar measure on AN in the
// coordinates (a_1..a_d) with Lebesgue da
double haar_density_an(const Vector& a);

enum class SamplerKind { chain, exact_modular, siegel_biased };

SamplerKind parse_sampler_kind(const std::string& s);
std::string to_string(SamplerKind k);

struct ChainConfig {
  int dim_d = 1;
  double step_scale = 0.5;  // epsilon
  int burn_in = 200;
  int gap = 25;
  std::uint64_t seed = 0;
  int renormalize_every = 10;
  int chains = 8;  // independent chains, chain c on stream c of the seed
  SamplerKind kind = SamplerKind::chain;

  void validate() const;
};

// One Markov chain g <- k2 a_eps k1 g on Sp(2d,R)/Sp(2d,Z).
class LatticeChain {
 public:
  LatticeChain(const ChainConfig& cfg, std::uint64_t seed, std::uint64_t stream = 0);
  Lattice next();

 private:
  void step();

  ChainConfig cfg_;
  Rng rng_;
  Matrix g_;
  SymplecticMatrix flow_;
  std::uint64_t steps_ = 0;
  bool burned_ = false;
};

// Several chains advanced in parallel; output i comes from chain i mod chains,
// so the stream depends on the seed and chain count only.
class ChainSampler : public LatticeSource {
 public:
  explicit ChainSampler(const ChainConfig& cfg, int threads = 0);
  int dim_d() const override { return cfg_.dim_d; }
  std::vector<Lattice> draw(std::size_t count) override;

 private:
  ChainConfig cfg_;
  int threads_;
  std::vector<LatticeChain> chains_;
  std::size_t next_chain_ = 0;
};

// d = 1: tau uniform for dx dy / y^2 on the modular fundamental domain,
// turned into the lattice Z + tau Z (rescaled) and rotated by a uniform angle.
class ExactModularSampler : public LatticeSource {
 public:
  explicit ExactModularSampler(std::uint64_t seed);
  int dim_d() const override { return 1; }
  std::vector<Lattice> draw(std::size_t count) override;
  Lattice next();
  // tau only, for nesting inside other estimators
  Matrix next_sl2();

 private:
  Rng rng_;
};

// Diagnostic: k a n with k Haar on K, a with density haar_density_an on the
// Siegel cone A_t, n uniform on |N_ij| <= 1/2, |(N^-1 M)_ij| <= 1/2. The
// Siegel set covers the quotient with multiplicity, so this is biased.
class SiegelBiasedSampler : public LatticeSource {
 public:
  SiegelBiasedSampler(int d, std::uint64_t seed);
  int dim_d() const override { return d_; }
  std::vector<Lattice> draw(std::size_t count) override;
  Lattice next();

 private:
  int d_;
  Rng rng_;
};

// Fixed lattice, for tests and degenerate-case handling.
class ConstantSampler : public LatticeSource {
 public:
  explicit ConstantSampler(Lattice lat) : lat_(std::move(lat)) {}
  int dim_d() const override { return lat_.dim_d(); }
  std::vector<Lattice> draw(std::size_t count) override { return std::vector<Lattice>(count, lat_); }

 private:
  Lattice lat_;
};

std::unique_ptr<LatticeSource> make_sampler(const ChainConfig& cfg, int threads = 0);

struct MvtCalibration {
  double mean = 0.0;
  double stderr_ = 0.0;
  double target_volume = 0.0;
  double z_score = 0.0;
  bool degenerate = false;  // zero spread, z undefined
  std::uint64_t samples = 0;
  std::vector<double> counts;
};

MvtCalibration calibrate_mvt(LatticeSource& sampler, const DomainSpec& spec, std::uint64_t samples, int threads = 0);
MvtCalibration calibrate_mvt(const ChainConfig& cfg, const DomainSpec& spec, std::uint64_t samples, int threads = 0);

}  // namespace symplattice
