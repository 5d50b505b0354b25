#include "symplattice/haar.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "symplattice/error.hpp"
#include "symplattice/parallel.hpp"
#include "symplattice/siegel.hpp"
#include "symplattice/statistics.hpp"

namespace symplattice {

SymplecticMatrix sample_orthogonal_symplectic(int d, Rng& rng) {
  if (d < 1) throw ValidationError("d must be positive", "d");
  const std::size_t n = static_cast<std::size_t>(d);
  ComplexMatrix u(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      const double re = rng.normal();
      u(i, j) = Complex(re, rng.normal());
    }
  // Gram-Schmidt leaves a positive real diagonal in the triangular factor,
  // which is the phase fixing that makes the result Haar
  orthonormalize_columns(u);
  return SymplecticMatrix::unchecked(unitary_to_symplectic(u));
}

double haar_density_an(const Vector& a) {
  if (a.empty()) throw ValidationError("a must be nonempty", "a");
  const int d = static_cast<int>(a.size());
  double out = 1.0;
  for (int i = 1; i <= d; ++i) {
    if (!(a[i - 1] > 0)) throw ValidationError("a entries must be positive", "a");
    out *= std::pow(a[i - 1], 2 * (d - i) + 1);
  }
  return out;
}

SamplerKind parse_sampler_kind(const std::string& s) {
  if (s == "chain") return SamplerKind::chain;
  if (s == "exact" || s == "exact-modular") return SamplerKind::exact_modular;
  if (s == "siegel-biased") return SamplerKind::siegel_biased;
  throw ValidationError("unknown sampler '" + s + "' (chain, exact-modular, siegel-biased)", "sampler.kind");
}

std::string to_string(SamplerKind k) {
  switch (k) {
    case SamplerKind::chain: return "chain";
    case SamplerKind::exact_modular: return "exact-modular";
    case SamplerKind::siegel_biased: return "siegel-biased";
  }
  return "chain";
}

void ChainConfig::validate() const {
  if (dim_d < 1) throw ValidationError("d must be positive", "d");
  if (!(step_scale > 0) || !std::isfinite(step_scale)) throw ValidationError("eps must be positive", "sampler.eps");
  if (burn_in < 1) throw ValidationError("burn_in must be at least 1", "sampler.burn_in");
  if (gap < 1) throw ValidationError("gap must be at least 1", "sampler.gap");
  if (renormalize_every < 1) throw ValidationError("renormalize_every must be at least 1", "sampler.renormalize_every");
  if (chains < 1) throw ValidationError("chains must be at least 1", "sampler.chains");
  if (kind == SamplerKind::exact_modular && dim_d != 1)
    throw ValidationError("the exact modular sampler exists for d = 1 only", "sampler");
}

LatticeChain::LatticeChain(const ChainConfig& cfg, std::uint64_t seed, std::uint64_t stream)
    : cfg_(cfg),
      rng_(seed, 0xc4a1 + (stream << 20)),
      g_(Matrix::identity(2 * static_cast<std::size_t>(cfg.dim_d))),
      flow_(diag_flow(cfg.dim_d, cfg.step_scale)) {
  cfg_.validate();
}

void LatticeChain::step() {
  const SymplecticMatrix k1 = sample_orthogonal_symplectic(cfg_.dim_d, rng_);
  const SymplecticMatrix k2 = sample_orthogonal_symplectic(cfg_.dim_d, rng_);
  g_ = k2.matrix() * (flow_.matrix() * (k1.matrix() * g_));
  if (++steps_ % static_cast<std::uint64_t>(cfg_.renormalize_every) == 0)
    g_ = siegel_reduce(SymplecticMatrix(g_, 1e-7)).kan();
}

Lattice LatticeChain::next() {
  if (!burned_) {
    for (int i = 0; i < cfg_.burn_in; ++i) step();
    burned_ = true;
  }
  for (int i = 0; i < cfg_.gap; ++i) step();
  return Lattice(SymplecticMatrix(g_, 1e-8));
}

ChainSampler::ChainSampler(const ChainConfig& cfg, int threads) : cfg_(cfg), threads_(threads) {
  cfg_.validate();
  for (int c = 0; c < cfg_.chains; ++c)
    chains_.emplace_back(cfg_, cfg_.seed, static_cast<std::uint64_t>(c));
}

std::vector<Lattice> ChainSampler::draw(std::size_t count) {
  const std::size_t nc = chains_.size();
  std::vector<Lattice> out(count);
  parallel_for(nc, threads_, [&](std::size_t c) {
    // chain c fills slots i with (next_chain_ + i) % nc == c, in order
    const std::size_t first = (c + nc - next_chain_ % nc) % nc;
    for (std::size_t i = first; i < count; i += nc) out[i] = chains_[c].next();
  });
  next_chain_ = (next_chain_ + count) % nc;
  return out;
}

ExactModularSampler::ExactModularSampler(std::uint64_t seed) : rng_(seed, 0x5112) {}

Matrix ExactModularSampler::next_sl2() {
  const double y0 = std::sqrt(3.0) / 2.0;
  for (;;) {
    const double x = rng_.uniform(-0.5, 0.5);
    const double y = y0 / rng_.uniform_pos();  // density proportional to 1/y^2 on [y0, inf)
    if (x * x + y * y < 1.0) continue;
    const double s = 1.0 / std::sqrt(y);
    return Matrix{{s, s * x}, {0.0, s * y}};
  }
}

Lattice ExactModularSampler::next() {
  const Matrix b = next_sl2();
  const double th = rng_.uniform(0.0, 2.0 * std::numbers::pi);
  const Matrix r{{std::cos(th), -std::sin(th)}, {std::sin(th), std::cos(th)}};
  return Lattice(SymplecticMatrix(r * b, 1e-9));
}

std::vector<Lattice> ExactModularSampler::draw(std::size_t count) {
  std::vector<Lattice> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) out.push_back(next());
  return out;
}

SiegelBiasedSampler::SiegelBiasedSampler(int d, std::uint64_t seed) : d_(d), rng_(seed, 0x51e6) {
  if (d < 1) throw ValidationError("d must be positive", "d");
}

Lattice SiegelBiasedSampler::next() {
  const std::size_t n = static_cast<std::size_t>(d_);
  // b_i = log a_i; with c_d = log t - b_d and c_i = b_{i+1} + log t - b_i the
  // cone is c >= 0 and the density factorises into exponentials of rates
  // sum_{i <= j} (2(d-i) + 2)
  const double lt = std::log(kSiegelT);
  Vector c(n);
  for (std::size_t j = 0; j < n; ++j) {
    double rate = 0.0;
    for (std::size_t i = 0; i <= j; ++i) rate += 2.0 * (d_ - static_cast<int>(i) - 1) + 2.0;
    c[j] = -std::log(rng_.uniform_pos()) / rate;
  }
  Vector a(n);
  double b = lt - c[n - 1];
  a[n - 1] = std::exp(b);
  for (std::size_t i = n - 1; i-- > 0;) {
    b = b + lt - c[i];
    a[i] = std::exp(b);
  }
  Matrix N = Matrix::identity(n), S(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i; j < n; ++j) {
      if (j > i) N(i, j) = rng_.uniform(-0.5, 0.5);
      S(i, j) = S(j, i) = rng_.uniform(-0.5, 0.5);
    }
  const UnipotentElement ne{N, N * S};
  const SymplecticMatrix k = sample_orthogonal_symplectic(d_, rng_);
  return Lattice(SymplecticMatrix(k.matrix() * diag_a(a) * ne.assemble(), 1e-8));
}

std::vector<Lattice> SiegelBiasedSampler::draw(std::size_t count) {
  std::vector<Lattice> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) out.push_back(next());
  return out;
}

std::unique_ptr<LatticeSource> make_sampler(const ChainConfig& cfg, int threads) {
  cfg.validate();
  switch (cfg.kind) {
    case SamplerKind::exact_modular: return std::make_unique<ExactModularSampler>(cfg.seed);
    case SamplerKind::siegel_biased: return std::make_unique<SiegelBiasedSampler>(cfg.dim_d, cfg.seed);
    case SamplerKind::chain: break;
  }
  return std::make_unique<ChainSampler>(cfg, threads);
}

MvtCalibration calibrate_mvt(LatticeSource& sampler, const DomainSpec& spec, std::uint64_t samples, int threads) {
  if (samples < 100) throw ValidationError("calibration needs at least 100 samples", "samples");
  spec.validate();
  if (sampler.dim_d() != spec.dim_d) throw ValidationError("sampler and domain dimensions differ", "d");
  const std::vector<Lattice> lats = sampler.draw(samples);
  MvtCalibration out;
  out.samples = samples;
  out.counts.resize(lats.size());
  parallel_for(lats.size(), threads, [&](std::size_t i) {
    out.counts[i] = static_cast<double>(count_points(lats[i], spec, CountMode::direct).count);
  });
  out.mean = mean(out.counts);
  out.stderr_ = standard_error(out.counts);
  out.target_volume = volume(spec);
  if (out.stderr_ > 0) {
    out.z_score = (out.mean - out.target_volume) / out.stderr_;
  } else {
    out.degenerate = true;
    out.z_score = std::numeric_limits<double>::quiet_NaN();
  }
  return out;
}

MvtCalibration calibrate_mvt(const ChainConfig& cfg, const DomainSpec& spec, std::uint64_t samples, int threads) {
  auto sampler = make_sampler(cfg, threads);
  return calibrate_mvt(*sampler, spec, samples, threads);
}

}  // namespace symplattice
