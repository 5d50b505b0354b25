#include "symplattice/statistics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <boost/math/special_functions/zeta.hpp>

#include "symplattice/error.hpp"
#include "symplattice/rng.hpp"

namespace symplattice {

void CompensatedSum::add(double x) {
  const double t = sum_ + x;
  if (std::abs(sum_) >= std::abs(x))
    comp_ += (sum_ - t) + x;
  else
    comp_ += (x - t) + sum_;
  sum_ = t;
}

namespace {

void require_nonempty(const std::vector<double>& xs, std::size_t min = 1) {
  if (xs.size() < min) throw ValidationError("not enough samples", "samples");
}

double central_moment(const std::vector<double>& xs, int k) {
  const double m = mean(xs);
  CompensatedSum s;
  for (double x : xs) s.add(std::pow(x - m, k));
  return s.value() / static_cast<double>(xs.size());
}

}  // namespace

double mean(const std::vector<double>& xs) {
  require_nonempty(xs);
  CompensatedSum s;
  for (double x : xs) s.add(x);
  return s.value() / static_cast<double>(xs.size());
}

double variance(const std::vector<double>& xs) {
  require_nonempty(xs);
  return central_moment(xs, 2);
}

double sample_variance(const std::vector<double>& xs) {
  require_nonempty(xs, 2);
  const double n = static_cast<double>(xs.size());
  return central_moment(xs, 2) * n / (n - 1.0);
}

double standard_error(const std::vector<double>& xs) {
  return std::sqrt(sample_variance(xs) / static_cast<double>(xs.size()));
}

double skewness(const std::vector<double>& xs) {
  require_nonempty(xs, 2);
  const double v = central_moment(xs, 2);
  return v > 0 ? central_moment(xs, 3) / std::pow(v, 1.5) : 0.0;
}

double excess_kurtosis(const std::vector<double>& xs) {
  require_nonempty(xs, 2);
  const double v = central_moment(xs, 2);
  return v > 0 ? central_moment(xs, 4) / (v * v) - 3.0 : 0.0;
}

double quantile(std::vector<double> xs, double p) {
  require_nonempty(xs);
  if (!(p >= 0 && p <= 1)) throw ValidationError("quantile level must lie in [0, 1]");
  std::sort(xs.begin(), xs.end());
  const double pos = p * static_cast<double>(xs.size() - 1);
  const auto i = static_cast<std::size_t>(std::floor(pos));
  if (i + 1 >= xs.size()) return xs.back();
  const double w = pos - static_cast<double>(i);
  return xs[i] * (1 - w) + xs[i + 1] * w;
}

std::pair<double, double> wilson_interval(std::uint64_t hits, std::uint64_t n, double z) {
  if (n == 0) throw ValidationError("Wilson interval needs n > 0", "samples");
  const double nn = static_cast<double>(n);
  const double p = static_cast<double>(hits) / nn;
  const double z2 = z * z;
  const double denom = 1.0 + z2 / nn;
  const double centre = (p + z2 / (2 * nn)) / denom;
  const double half = z * std::sqrt(p * (1 - p) / nn + z2 / (4 * nn * nn)) / denom;
  return {std::max(0.0, centre - half), std::min(1.0, centre + half)};
}

LinearFit linear_fit(const std::vector<double>& xs, const std::vector<double>& ys) {
  if (xs.size() != ys.size() || xs.size() < 2) throw ValidationError("linear fit needs two or more paired points");
  const double n = static_cast<double>(xs.size());
  const double mx = mean(xs), my = mean(ys);
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
  }
  if (!(sxx > 0)) throw ValidationError("linear fit needs distinct abscissae");
  LinearFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  if (xs.size() > 2) {
    double rss = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      const double r = ys[i] - fit.intercept - fit.slope * xs[i];
      rss += r * r;
    }
    fit.slope_stderr = std::sqrt(rss / (n - 2) / sxx);
  }
  return fit;
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

double ks_normal(std::vector<double> xs, double m, double sd) {
  require_nonempty(xs);
  if (!(sd > 0)) throw ValidationError("KS reference needs a positive standard deviation");
  std::sort(xs.begin(), xs.end());
  const double n = static_cast<double>(xs.size());
  double d = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double f = normal_cdf((xs[i] - m) / sd);
    d = std::max({d, f - static_cast<double>(i) / n, static_cast<double>(i + 1) / n - f});
  }
  return d;
}

double ks_two_sample(std::vector<double> a, std::vector<double> b) {
  require_nonempty(a);
  require_nonempty(b);
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
  std::size_t i = 0, j = 0;
  double d = 0;
  while (i < a.size() && j < b.size()) {
    const double x = std::min(a[i], b[j]);
    while (i < a.size() && a[i] == x) ++i;
    while (j < b.size() && b[j] == x) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  return d;
}

double median_of_means(const std::vector<double>& xs, int groups) {
  if (groups < 1) throw ValidationError("median of means needs at least one group");
  const std::size_t g = static_cast<std::size_t>(groups);
  if (xs.size() < g) throw ValidationError("fewer samples than median-of-means groups", "samples");
  std::vector<double> means;
  for (std::size_t k = 0; k < g; ++k) {
    const std::size_t lo = k * xs.size() / g, hi = (k + 1) * xs.size() / g;
    CompensatedSum s;
    for (std::size_t i = lo; i < hi; ++i) s.add(xs[i]);
    means.push_back(s.value() / static_cast<double>(hi - lo));
  }
  return quantile(means, 0.5);
}

double bootstrap_stderr(const std::vector<double>& xs, const std::function<double(const std::vector<double>&)>& stat,
                        int resamples, std::uint64_t seed) {
  require_nonempty(xs);
  if (resamples < 2) throw ValidationError("bootstrap needs at least two resamples");
  Rng rng(seed, 0xb007);
  std::vector<double> re(xs.size()), vals;
  for (int b = 0; b < resamples; ++b) {
    for (auto& x : re) x = xs[rng.below(xs.size())];
    vals.push_back(stat(re));
  }
  return std::sqrt(sample_variance(vals));
}

double riemann_zeta(double s) { return boost::math::zeta(s); }

}  // namespace symplattice
