#pragma once

#include <cstdint>
#include <vector>

#include "symplattice/lattice.hpp"
#include "symplattice/matrix.hpp"

namespace symplattice {

struct AlphaResult {
  double value = 1.0;
  int witness_rank = 0;
  std::vector<Vector> witness_vectors;
  bool certified = false;
  // minimal covolume found for each rank r = 1..2d
  std::vector<double> rank_covolumes;
};

// alpha of diag(a, 1/a) Z^{2d}
double alpha_diag(const Vector& a);

// gamma_r^r for the Hermite constant; exact for r <= 8, Blichfeldt's bound beyond
double hermite_power(int r);

// sqrt(det Gram) with diagonal scaling; 0 when the vectors are dependent
// (a scaled pivot below 1e-14)
double gram_covolume(const std::vector<Vector>& vs);

// Minimal-covolume sublattice of every rank. The recursion tries each
// primitive v below the Hermite bound for the current best covolume and
// recurses on the projection along v, so the result is exact whenever no
// required bound exceeded `search_radius`; `certified` reports that.
// Otherwise the value is a lower bound for alpha.
AlphaResult alpha_search(const Lattice& lat, double search_radius,
                         std::uint64_t node_budget = kDefaultNodeBudget);
AlphaResult alpha_search(const Matrix& basis, double search_radius,
                         std::uint64_t node_budget = kDefaultNodeBudget);

struct TailRow {
  double L = 0.0;
  double survival = 0.0;
  double ci_lo = 0.0;
  double ci_hi = 0.0;
  std::uint64_t hits = 0;
};

struct TailStats {
  std::vector<TailRow> rows;
  double slope = 0.0;
  double slope_ci_lo = 0.0;
  double slope_ci_hi = 0.0;
  int fit_points = 0;
  bool empty_tail = false;
  std::uint64_t samples = 0;
};

// Survival table of alpha over the L grid with Wilson 95% intervals and a
// least-squares log-log slope with a 200-resample bootstrap interval.
TailStats alpha_tail_stats(const std::vector<double>& alphas, const std::vector<double>& L_grid, std::uint64_t seed,
                           int bootstrap = 200);

class LatticeSource;
TailStats alpha_tail_stats(LatticeSource& sampler, const std::vector<double>& L_grid, std::uint64_t samples,
                           std::uint64_t seed, int threads = 0, std::vector<double>* alphas_out = nullptr);

}  // namespace symplattice
