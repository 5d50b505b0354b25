#include "symplattice/cumulants.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "symplattice/error.hpp"
#include "symplattice/rng.hpp"
#include "symplattice/statistics.hpp"

namespace symplattice {

namespace {

void extend(int i, int r, std::vector<int>& label, int blocks, std::vector<Partition>& out) {
  if (i == r) {
    Partition p(static_cast<std::size_t>(blocks));
    for (int k = 0; k < r; ++k) p[static_cast<std::size_t>(label[k])].push_back(k);
    out.push_back(std::move(p));
    return;
  }
  for (int b = 0; b <= blocks; ++b) {
    label[i] = b;
    extend(i + 1, r, label, std::max(blocks, b + 1), out);
  }
}

unsigned mask_of(const std::vector<int>& block) {
  unsigned m = 0;
  for (int i : block) m |= 1u << i;
  return m;
}

}  // namespace

std::vector<Partition> set_partitions(int r) {
  if (r < 1) throw ValidationError("partitions need r >= 1", "r");
  std::vector<Partition> out;
  std::vector<int> label(static_cast<std::size_t>(r), 0);
  extend(0, r, label, 0, out);
  return out;
}

std::uint64_t bell_number(int r) {
  // Bell triangle
  std::vector<std::uint64_t> row{1};
  for (int i = 1; i <= r; ++i) {
    std::vector<std::uint64_t> next{row.back()};
    for (std::uint64_t x : row) next.push_back(next.back() + x);
    row = std::move(next);
  }
  return row.front();
}

double joint_cumulant(const std::vector<std::vector<double>>& streams, const std::optional<Partition>& given) {
  const int r = static_cast<int>(streams.size());
  if (r < 1) throw ValidationError("joint cumulant needs at least one stream", "streams");
  if (r > kMaxCumulantOrder)
    throw ValidationError("joint cumulant order " + std::to_string(r) + " exceeds 8: the partition sum has Bell(r) terms (" +
                              std::to_string(bell_number(r)) + " at this order)",
                          "r");
  const std::size_t n = streams[0].size();
  if (n < 2) throw ValidationError("streams need at least two samples", "samples");
  for (const auto& s : streams)
    if (s.size() != n) throw ValidationError("streams differ in length", "streams");

  // empirical moment of the product over every subset
  const unsigned full = (1u << r) - 1;
  std::vector<double> moment(full + 1, 1.0);
  for (unsigned m = 1; m <= full; ++m) {
    CompensatedSum acc;
    for (std::size_t t = 0; t < n; ++t) {
      double p = 1.0;
      for (int i = 0; i < r; ++i)
        if (m & (1u << i)) p *= streams[static_cast<std::size_t>(i)][t];
      acc.add(p);
    }
    moment[m] = acc.value() / static_cast<double>(n);
  }

  std::vector<unsigned> given_masks;
  if (given) {
    unsigned seen = 0;
    for (const auto& b : *given) {
      const unsigned m = mask_of(b);
      if (m & seen || b.empty()) throw ValidationError("conditioning partition is not a partition", "Q");
      seen |= m;
      given_masks.push_back(m);
    }
    if (seen != full) throw ValidationError("conditioning partition does not cover 1..r", "Q");
  }

  double factorial[kMaxCumulantOrder + 1] = {1};
  for (int i = 1; i <= kMaxCumulantOrder; ++i) factorial[i] = factorial[i - 1] * i;

  CompensatedSum total;
  for (const Partition& p : set_partitions(r)) {
    double term = 1.0;
    for (const auto& block : p) {
      const unsigned m = mask_of(block);
      if (given_masks.empty()) {
        term *= moment[m];
      } else {
        for (unsigned q : given_masks) term *= moment[m & q];  // moment[0] = 1
      }
    }
    const int k = static_cast<int>(p.size());
    total.add(((k - 1) % 2 ? -1.0 : 1.0) * factorial[k - 1] * term);
  }
  return total.value();
}

CumulantTable cumulant_table(const std::vector<double>& xs, int r_max, int bootstrap, std::uint64_t seed) {
  if (r_max < 1 || r_max > kMaxCumulantOrder) throw ValidationError("r_max must lie in 1..8", "r_max");
  CumulantTable t;
  t.sample_count = xs.size();
  for (int r = 1; r <= r_max; ++r) {
    auto stat = [r](const std::vector<double>& s) {
      return joint_cumulant(std::vector<std::vector<double>>(static_cast<std::size_t>(r), s));
    };
    t.values.push_back(stat(xs));
    t.stderrs.push_back(bootstrap >= 2 ? bootstrap_stderr(xs, stat, bootstrap, seed + static_cast<std::uint64_t>(r))
                                       : std::nan(""));
  }
  return t;
}

PartitionSchedule PartitionSchedule::standard(int r, double gamma) {
  if (r < 3) throw ValidationError("r must be at least 3", "r");
  if (!(gamma > 0) || !std::isfinite(gamma)) throw ValidationError("gamma must be positive", "gamma");
  PartitionSchedule s;
  s.r = r;
  s.alpha.push_back(0.0);
  s.beta.push_back(gamma);
  for (int j = 1; j < r; ++j) {
    s.alpha.push_back((3.0 + r) * s.beta.back());
    s.beta.push_back(s.alpha.back() + gamma);
  }
  s.validate();
  return s;
}

void PartitionSchedule::validate() const {
  if (r < 3) throw ValidationError("r must be at least 3", "r");
  if (alpha.size() != static_cast<std::size_t>(r) || beta.size() != static_cast<std::size_t>(r))
    throw ValidationError("schedule needs r alphas and r betas", "schedule");
  if (alpha[0] != 0.0) throw ValidationError("alpha_0 must be 0", "schedule");
  for (int j = 0; j < r; ++j) {
    if (!(alpha[j] < beta[j])) throw ValidationError("schedule violates alpha_j < beta_{j+1}", "schedule");
    if (j + 1 < r && !(beta[j] < alpha[j + 1])) throw ValidationError("schedule violates beta_j < alpha_j", "schedule");
  }
}

CoverCertificate partition_cover_check(int r, double gamma, int grid_max) {
  if (r < 3 || r > 5) throw ValidationError("r must lie in 3..5", "r");
  return partition_cover_check(PartitionSchedule::standard(r, gamma), grid_max);
}

CoverCertificate partition_cover_check(const PartitionSchedule& schedule, int grid_max) {
  schedule.validate();
  const int r = schedule.r;
  if (r > 5) throw ValidationError("r must lie in 3..5", "r");
  if (grid_max < 0 || grid_max > 40) throw ValidationError("grid must lie in 0..40", "grid");

  std::vector<Partition> parts;
  for (auto& p : set_partitions(r))
    if (p.size() >= 2) parts.push_back(std::move(p));

  CoverCertificate cert;
  cert.schedule = schedule;
  cert.partitions_enumerated = bell_number(r);
  cert.per_level.assign(static_cast<std::size_t>(r), 0);

  auto in_delta_q = [&](const std::vector<int>& s, const Partition& q, double a, double b) {
    for (const auto& block : q) {
      int lo = s[block[0]], hi = lo;
      for (int i : block) {
        lo = std::min(lo, s[i]);
        hi = std::max(hi, s[i]);
      }
      if (hi - lo > a) return false;
    }
    for (std::size_t x = 0; x < q.size(); ++x)
      for (std::size_t y = x + 1; y < q.size(); ++y)
        for (int i : q[x])
          for (int j : q[y])
            if (!(std::abs(s[i] - s[j]) > b)) return false;
    return true;
  };

  std::vector<int> s(static_cast<std::size_t>(r), 0);
  for (;;) {
    ++cert.tuples_checked;
    const auto [mn, mx] = std::minmax_element(s.begin(), s.end());
    bool ok = false;
    if (*mx - *mn <= schedule.beta[r - 1]) {
      ++cert.in_diagonal;
      ok = true;
    }
    for (int j = 0; j < r && !ok; ++j)
      for (const auto& q : parts)
        if (in_delta_q(s, q, schedule.alpha[j], schedule.beta[j])) {
          ++cert.per_level[j];
          ok = true;
          break;
        }
    if (!ok && cert.covered) {
      cert.covered = false;
      cert.counterexample = s;
    }
    int i = 0;
    while (i < r && s[i] == grid_max) s[i++] = 0;
    if (i == r) break;
    ++s[i];
  }
  return cert;
}

}  // namespace symplattice
