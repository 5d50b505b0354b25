#include "symplattice/domain.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "symplattice/error.hpp"
#include "symplattice/parallel.hpp"
#include "symplattice/rng.hpp"

namespace symplattice {

DomainSpec::DomainSpec(int d, double T, double lo, double hi)
    : dim_d(d), product_lo(lo), product_hi(hi), cutoff_T(T) {
  validate();
}

void DomainSpec::validate() const {
  if (dim_d < 1 || dim_d > 8) throw ValidationError("d must be in [1, 8]", "d");
  if (!(product_lo > 0)) throw ValidationError("product_lo must be positive", "product_lo");
  if (!(product_hi > product_lo)) throw ValidationError("product_hi must exceed product_lo", "product_hi");
  if (!(cutoff_T > 1) || !std::isfinite(cutoff_T)) throw ValidationError("T must be finite and > 1", "T");
}

DomainSpec domain_pow2(int d, int N, double lo, double hi) {
  if (N < 1 || N > 1000) throw ValidationError("N must be in [1, 1000]", "N");
  return DomainSpec(d, std::ldexp(1.0, N), lo, hi);
}

namespace {

bool near(double value, double bound) {
  return value != bound && std::abs(value - bound) <= 1e-12 * std::abs(bound);
}

}  // namespace

GuardedMembership contains_guarded(const DomainSpec& spec, const double* p) {
  const int d = spec.dim_d;
  double xx = 0.0, yy = 0.0;
  for (int i = 0; i < d; ++i) {
    xx += p[i] * p[i];
    yy += p[i + d] * p[i + d];
  }
  // squared comparisons keep integer lattices exact
  const double prod = xx * yy;
  const double lo2 = spec.product_lo * spec.product_lo;
  const double hi2 = spec.product_hi * spec.product_hi;
  const double t2 = spec.cutoff_T * spec.cutoff_T;
  GuardedMembership r;
  r.inside = prod >= lo2 && prod <= hi2 && yy >= 1.0 && yy < t2;
  r.ambiguous = near(prod, lo2) || near(prod, hi2) || near(yy, 1.0) || near(yy, t2);
  return r;
}

bool contains(const DomainSpec& spec, const Vector& point) {
  if (point.size() != static_cast<std::size_t>(2 * spec.dim_d))
    throw ValidationError("point length must be 2d");
  return contains_guarded(spec, point.data()).inside;
}

double sphere_constant(int d) {
  return 2.0 * std::exp(0.5 * d * std::log(std::numbers::pi) - std::lgamma(0.5 * d));
}

double unit_ball_volume(int n) {
  return std::exp(0.5 * n * std::log(std::numbers::pi) - std::lgamma(0.5 * n + 1.0));
}

double volume(const DomainSpec& spec) {
  spec.validate();
  const int d = spec.dim_d;
  const double c = sphere_constant(d);
  return c * c * (std::pow(spec.product_hi, d) - std::pow(spec.product_lo, d)) / d * std::log(spec.cutoff_T);
}

McEstimate volume_monte_carlo(const DomainSpec& spec, std::uint64_t samples, std::uint64_t seed) {
  spec.validate();
  if (samples < 1000) throw ValidationError("volume_monte_carlo needs at least 1000 samples", "samples");
  const int d = spec.dim_d;
  // strata: shells 2^m <= |y| < 2^{m+1}, truncated at T
  std::vector<double> r0, r1, box;
  for (double r = 1.0; r < spec.cutoff_T; r *= 2.0) {
    const double top = std::min(2.0 * r, spec.cutoff_T);
    r0.push_back(r);
    r1.push_back(top);
    // y uniform in the shell, x uniform in the ball of radius hi/r
    const double shell = unit_ball_volume(d) * (std::pow(top, d) - std::pow(r, d));
    box.push_back(shell * unit_ball_volume(d) * std::pow(spec.product_hi / r, d));
  }
  const std::size_t strata = r0.size();
  double total_box = 0.0;
  for (double b : box) total_box += b;

  std::vector<std::uint64_t> n(strata);
  for (std::size_t s = 0; s < strata; ++s)
    n[s] = std::max<std::uint64_t>(2, static_cast<std::uint64_t>(samples * box[s] / total_box));

  std::vector<double> est(strata), var(strata);
  parallel_for(strata, 0, [&](std::size_t s) {
    Rng rng(seed, s);
    std::vector<double> x(d), y(d);
    std::uint64_t hits = 0;
    const double a = std::pow(r0[s], d), b = std::pow(r1[s], d);
    const double rx = spec.product_hi / r0[s];
    const double lo = spec.product_lo, hi = spec.product_hi;
    for (std::uint64_t i = 0; i < n[s]; ++i) {
      const double ry = std::pow(a + (b - a) * rng.uniform(), 1.0 / d);
      const double rxx = rx * std::pow(rng.uniform(), 1.0 / d);
      // only the norms matter for membership, directions are not sampled
      const double p = rxx * ry;
      if (p >= lo && p <= hi) ++hits;
    }
    const double phat = static_cast<double>(hits) / n[s];
    est[s] = box[s] * phat;
    var[s] = box[s] * box[s] * phat * (1.0 - phat) / n[s];
  });
  McEstimate r;
  double v = 0.0;
  for (std::size_t s = 0; s < strata; ++s) {
    r.estimate += est[s];
    v += var[s];
  }
  r.stderr_ = std::sqrt(v);
  return r;
}

TileIndex::TileIndex(int m_, int N_) : m(m_), N(N_) {
  if (N < 1) throw ValidationError("tile count N must be positive", "N");
  if (m < 0 || m >= N) throw ValidationError("tile index m must satisfy 0 <= m < N", "m");
}

void apply_b_power(Vector& v, int m) {
  const std::size_t d = v.size() / 2;
  for (std::size_t i = 0; i < d; ++i) {
    v[i] = std::ldexp(v[i], m);
    v[i + d] = std::ldexp(v[i + d], -m);
  }
}

bool tile_membership(const TileIndex& tile, const Vector& point, double lo, double hi) {
  if (point.size() % 2 != 0 || point.empty()) throw ValidationError("point length must be 2d");
  Vector w = point;
  apply_b_power(w, tile.m);
  DomainSpec omega2(static_cast<int>(point.size() / 2), 2.0, lo, hi);
  return contains_guarded(omega2, w.data()).inside;
}

}  // namespace symplattice
