#pragma once

#include <cstdint>
#include <optional>
#include <vector>

namespace symplattice {

// A set partition of {0..r-1}; each block lists its elements in increasing order.
using Partition = std::vector<std::vector<int>>;

// All set partitions of {0..r-1} in restricted-growth order.
std::vector<Partition> set_partitions(int r);
std::uint64_t bell_number(int r);

inline constexpr int kMaxCumulantOrder = 8;

// Plug-in joint cumulant of r equal-length streams, using empirical moments.
// With `given`, the conditional cumulant: each moment factor over a block I
// of the summed partition becomes the product over blocks J of `given` of the
// moments over I ∩ J.
double joint_cumulant(const std::vector<std::vector<double>>& streams,
                      const std::optional<Partition>& given = std::nullopt);

struct CumulantTable {
  std::vector<double> values;   // values[r-1] = cum_r(x, ..., x)
  std::vector<double> stderrs;  // bootstrap
  std::uint64_t sample_count = 0;
};

CumulantTable cumulant_table(const std::vector<double>& xs, int r_max, int bootstrap, std::uint64_t seed);

// 0 = alpha_0 < beta_1 < alpha_1 < ... < alpha_{r-1} < beta_r
struct PartitionSchedule {
  int r = 3;
  std::vector<double> alpha;  // alpha_0 .. alpha_{r-1}
  std::vector<double> beta;   // beta_1 .. beta_r stored at beta[0..r-1]

  // beta_1 = gamma, alpha_j = (3 + r) beta_j, beta_{j+1} = alpha_j + gamma
  static PartitionSchedule standard(int r, double gamma);
  // throws ValidationError unless the interlacing holds
  void validate() const;
};

struct CoverCertificate {
  bool covered = true;
  std::uint64_t tuples_checked = 0;
  std::uint64_t partitions_enumerated = 0;  // partitions of {1..r}
  std::uint64_t in_diagonal = 0;            // tuples inside Delta(beta_r)
  std::vector<std::uint64_t> per_level;     // first level j covering each remaining tuple
  std::vector<int> counterexample;          // first uncovered tuple
  PartitionSchedule schedule;
};

// Exhaustive check that {0..grid_max}^r is covered by Delta(beta_r) and the
// sets Delta_Q(alpha_j, beta_{j+1}) over partitions Q with two or more blocks.
CoverCertificate partition_cover_check(int r, double gamma, int grid_max);
CoverCertificate partition_cover_check(const PartitionSchedule& schedule, int grid_max);

}  // namespace symplattice
