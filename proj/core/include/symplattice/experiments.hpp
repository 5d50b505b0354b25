#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "symplattice/domain.hpp"
#include "symplattice/haar.hpp"
#include "symplattice/lattice.hpp"
#include "symplattice/symplectic.hpp"

namespace symplattice {

// Refuses (CalibrationError) when |z| of calibrate_mvt on Omega_2 exceeds
// `max_abs_z`; returns the calibration otherwise.
MvtCalibration calibration_gate(const ChainConfig& cfg, std::uint64_t samples, int threads, double max_abs_z = 4.0);

struct CltRow {
  int N = 0;
  double mean = 0.0;
  double var = 0.0;  // plug-in, equals cum2
  double cum3 = 0.0, cum3_se = 0.0;
  double cum4 = 0.0, cum4_se = 0.0;
  double ks = 0.0;
  double skew = 0.0;
  double exkurt = 0.0;
  std::uint64_t n = 0;
};

struct CltReport {
  int dim_d = 0;
  double tile_volume = 0.0;  // Vol(Omega_2)
  std::vector<CltRow> rows;
  bool exploratory = false;  // d < 4
  MvtCalibration calibration;
};

// X = (count - N Vol(Omega_2)) / sqrt(N Vol(Omega_2)) per sample; tile_counts[i][m]
// is #(b^m Lambda_i ∩ Omega_2) and must cover the largest N.
CltReport clt_from_tiles(int d, const std::vector<std::vector<std::uint64_t>>& tile_counts,
                         const std::vector<int>& N_list, double tile_volume, int bootstrap, std::uint64_t seed);

struct CltConfig {
  ChainConfig sampler;
  std::vector<int> N_list;
  std::uint64_t samples = 400;
  std::uint64_t calibration_samples = 2000;
  int bootstrap = 200;
  int threads = 0;
};

CltReport clt_experiment(const CltConfig& cfg);

// f(v) = chi_Omega(j b^s v)
struct DomainIndicator {
  DomainSpec spec;
  int s = 0;
  double dilation = 1.0;

  bool operator()(const double* v) const;
  double inner_radius() const;
  double outer_radius() const;
  double lebesgue() const;
};

enum class PMode { closed_form, definitional };

struct PTransformConfig {
  PMode mode = PMode::closed_form;
  std::uint64_t samples = 20000;  // per slice integral, or outer samples in definitional mode
  std::uint64_t seed = 0;
  // second unitary acting on the orthogonal complement of e_1, for checking
  // frame independence of the closed form
  bool alternate_frame = false;
};

struct PTransformResult {
  double value = 0.0;
  double stderr_ = 0.0;
  double line_sum = 0.0;  // sum_{n != 0} f(n x)
};

// K in K with K e_{d+1} = u (unit); built as a complex Householder reflection
// in the unitary model. `twist` optionally composes with a unitary fixing e_1.
Matrix frame_for(const Vector& u, const Matrix* twist = nullptr);

PTransformResult p_transform(const DomainIndicator& f, const Vector& x, const PTransformConfig& cfg);

struct SecondMomentConfig {
  ChainConfig sampler;  // dim_d must be 2
  int s = 0;
  std::uint64_t lattice_samples = 50000;
  std::uint64_t mc_points = 1000000;
  int explicit_j = 64;
  int mom_groups = 16;
  std::uint64_t calibration_samples = 2000;
  int threads = 0;
};

struct SecondMomentReport {
  double lhs = 0.0;       // median of means of fhat * ghat
  double lhs_mean = 0.0;  // plain mean, for reference
  double lhs_stderr = 0.0;
  double rhs = 0.0;
  double rhs_stderr = 0.0;
  double relative_error = 0.0;
  double zeta_2d = 0.0;
  int explicit_j = 0;
  MvtCalibration calibration;
};

SecondMomentReport second_moment_check(const SecondMomentConfig& cfg);

struct DecayRow {
  int s = 0;
  double D = 0.0;
  double stderr_ = 0.0;
};

struct DecayReport {
  std::vector<DecayRow> rows;
  double rate = 0.0;  // least-squares slope of log D(s) in s
  double rate_stderr = 0.0;
  double tile_volume = 0.0;
  double count_variance = 0.0;  // plug-in variance of #(Lambda ∩ Omega_2)
  std::uint64_t samples = 0;
  MvtCalibration calibration;
};

DecayReport decay_from_tiles(const std::vector<std::vector<std::uint64_t>>& tile_counts, int s_max, double tile_volume);

struct DecayConfig {
  ChainConfig sampler;
  int s_max = 6;
  std::uint64_t samples = 20000;
  std::uint64_t calibration_samples = 2000;
  int threads = 0;
};

DecayReport correlation_decay(const DecayConfig& cfg);

// Tile counts m = 0..N-1 for `samples` lattices from the source, in parallel.
std::vector<std::vector<std::uint64_t>> sample_tile_counts(LatticeSource& source, std::uint64_t samples, int N,
                                                           int threads);

}  // namespace symplattice
