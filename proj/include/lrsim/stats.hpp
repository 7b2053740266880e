#pragma once

// Summary statistics and hypothesis tests used by the validation suites.

#include <span>
#include <vector>

namespace lrsim {

double mean(std::span<const double> x);
/// Unbiased sample variance; 0 for fewer than two points.
double variance(std::span<const double> x);
double standard_error(std::span<const double> x);

/// Standard error of the mean of an autocorrelated series by
/// non-overlapping batch means.
double batch_means_stderr(std::span<const double> x, int batches = 25);

/// Type-7 (linear interpolation) sample quantile.
double quantile(std::vector<double> x, double q);

struct TestResult {
  double statistic = 0.0;
  double p_value = 1.0;
};

/// P(K > t) for the Kolmogorov distribution.
double kolmogorov_survival(double t);

/// Two-sample Kolmogorov-Smirnov test with the asymptotic p-value.
TestResult ks_two_sample(std::vector<double> a, std::vector<double> b);

/// One-sample KS distance against a continuous CDF.
double ks_distance(std::vector<double> x, double (*cdf)(double, const void*), const void* ctx);

/// Chi-square test of homogeneity between two count vectors; categories
/// with small expected counts are pooled into their neighbours.
TestResult chi_square_homogeneity(std::span<const long> a, std::span<const long> b);

struct SlopeFit {
  double slope = 0.0;
  double intercept = 0.0;
  double slope_stderr = 0.0;
  double ci_low = 0.0;   // 95% interval
  double ci_high = 0.0;
};

/// Least squares of log y on log x.
SlopeFit fit_loglog(std::span<const double> x, std::span<const double> y);

/// Gelman-Rubin potential scale reduction over equal-length chains.
/// Returns 1 when fewer than two non-trivial chains are given.
double potential_scale_reduction(const std::vector<std::vector<double>>& chains);

}  // namespace lrsim
