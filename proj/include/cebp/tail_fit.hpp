#pragma once

#include <span>
#include <vector>

namespace cebp {

/// Straight-line fit of log(-log p) against log(abscissa). Only grid points
/// with 0 < p < 1 are kept; the slope estimates a stretched-exponential
/// tail exponent.
struct TailFit {
  std::vector<double> abscissa;
  std::vector<double> p_hat;
  std::vector<double> log_minus_log_prob;
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
  double target_exponent = 0.0;

  double relative_error() const;
};

/// Throws INSUFFICIENT_TAIL_POINTS when fewer than `min_points` usable points remain.
TailFit fit_tail(std::span<const double> abscissa, std::span<const double> p_hat, double target_exponent,
                 std::size_t min_points = 4);

/// Grid of sample quantiles at probabilities log-spaced in [p_lo, p_hi];
/// strictly increasing, duplicates dropped. Used to place lower-tail grids.
std::vector<double> lower_tail_grid(std::span<const double> samples, std::size_t points, double p_lo, double p_hi);
/// Same for the upper tail: quantiles at 1 - p for p log-spaced in [p_lo, p_hi].
std::vector<double> upper_tail_grid(std::span<const double> samples, std::size_t points, double p_lo, double p_hi);

}  // namespace cebp
