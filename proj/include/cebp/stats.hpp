#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace cebp::stats {

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
  std::size_t n = 0;
};

/// Ordinary least squares y = intercept + slope * x. Needs n >= 2 distinct x.
LinearFit least_squares(std::span<const double> x, std::span<const double> y);

double mean(std::span<const double> x);
/// Unbiased sample variance; 0 for n < 2.
double variance(std::span<const double> x);

/// Two-sample Kolmogorov-Smirnov statistic sup |F_a - F_b|. Inputs need not
/// be sorted; ties across samples are handled exactly.
double ks_distance(std::span<const double> a, std::span<const double> b);

/// Empirical p-quantile (type 1, inverse of the ECDF) of unsorted data.
double quantile(std::span<const double> x, double p);

}  // namespace cebp::stats
