#pragma once

#include <cstdint>

#include "symplattice/matrix.hpp"

namespace symplattice {

// Omega_T = { (x, y) : lo <= |x||y| <= hi, 1 <= |y| < T } in R^{2d}
struct DomainSpec {
  int dim_d = 1;
  double product_lo = 1.0;
  double product_hi = 2.0;
  double cutoff_T = 2.0;

  DomainSpec() = default;
  DomainSpec(int d, double T, double lo = 1.0, double hi = 2.0);

  // throws ValidationError naming the bad field
  void validate() const;
};

// Omega_{2^N}
DomainSpec domain_pow2(int d, int N, double lo = 1.0, double hi = 2.0);

enum class Membership { outside, inside };

// Result of a guarded membership test: `ambiguous` is set when one of the
// defining inequalities holds or fails by less than 1e-12 relative.
struct GuardedMembership {
  bool inside = false;
  bool ambiguous = false;
};

bool contains(const DomainSpec& spec, const Vector& point);
GuardedMembership contains_guarded(const DomainSpec& spec, const double* point);

// total measure of the unit sphere S^{d-1}: 2 pi^{d/2} / Gamma(d/2)
double sphere_constant(int d);
// Lebesgue measure of the unit ball in R^n
double unit_ball_volume(int n);

double volume(const DomainSpec& spec);

struct McEstimate {
  double estimate = 0.0;
  double stderr_ = 0.0;
};

McEstimate volume_monte_carlo(const DomainSpec& spec, std::uint64_t samples, std::uint64_t seed);

struct TileIndex {
  int m = 0;
  int N = 1;

  TileIndex(int m_, int N_);
};

// b^m point in Omega_2, b = diag(2 I, I/2)
bool tile_membership(const TileIndex& tile, const Vector& point, double lo = 1.0, double hi = 2.0);

// Apply b^m in place (exact: powers of two).
void apply_b_power(Vector& v, int m);

}  // namespace symplattice
