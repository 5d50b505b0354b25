#pragma once

#include <cstdint>
#include <functional>
#include <utility>
#include <vector>

namespace symplattice {

// Neumaier-compensated running sum.
class CompensatedSum {
 public:
  void add(double x);
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0, comp_ = 0.0;
};

double mean(const std::vector<double>& xs);
// plug-in (biased) variance, divides by n
double variance(const std::vector<double>& xs);
// unbiased variance, divides by n - 1
double sample_variance(const std::vector<double>& xs);
// sqrt(sample_variance / n)
double standard_error(const std::vector<double>& xs);
double skewness(const std::vector<double>& xs);
double excess_kurtosis(const std::vector<double>& xs);

// linear interpolation between order statistics, p in [0, 1]
double quantile(std::vector<double> xs, double p);

// Wilson score interval for hits / n at the given normal quantile
std::pair<double, double> wilson_interval(std::uint64_t hits, std::uint64_t n, double z = 1.959963984540054);

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double slope_stderr = 0.0;
};
LinearFit linear_fit(const std::vector<double>& xs, const std::vector<double>& ys);

double normal_cdf(double x);

// sup |F_n - Phi((x - mean) / sd)|
double ks_normal(std::vector<double> xs, double mean, double sd);
// two-sample Kolmogorov-Smirnov statistic
double ks_two_sample(std::vector<double> a, std::vector<double> b);

// Median of the means of `groups` consecutive blocks.
double median_of_means(const std::vector<double>& xs, int groups = 16);

// Standard deviation of `stat` over bootstrap resamples.
double bootstrap_stderr(const std::vector<double>& xs, const std::function<double(const std::vector<double>&)>& stat,
                        int resamples, std::uint64_t seed);

double riemann_zeta(double s);

}  // namespace symplattice
