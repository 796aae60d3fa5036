#include "cebp/tail_fit.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "cebp/error.hpp"
#include "cebp/stats.hpp"

namespace cebp {

double TailFit::relative_error() const {
  return std::abs(slope - target_exponent) / std::abs(target_exponent);
}

TailFit fit_tail(std::span<const double> abscissa, std::span<const double> p_hat, double target_exponent,
                 std::size_t min_points) {
  if (abscissa.size() != p_hat.size()) throw Error(Errc::invalid_argument, "fit_tail: size mismatch");
  TailFit fit;
  fit.target_exponent = target_exponent;
  std::vector<double> lx;
  for (std::size_t i = 0; i < abscissa.size(); ++i) {
    const double p = p_hat[i];
    if (!(p > 0.0 && p < 1.0) || !(abscissa[i] > 0.0)) continue;
    fit.abscissa.push_back(abscissa[i]);
    fit.p_hat.push_back(p);
    fit.log_minus_log_prob.push_back(std::log(-std::log(p)));
    lx.push_back(std::log(abscissa[i]));
  }
  if (fit.abscissa.size() < min_points) {
    throw Error(Errc::insufficient_tail_points, "only " + std::to_string(fit.abscissa.size()) +
                                                    " grid points with 0 < p < 1 (need " +
                                                    std::to_string(min_points) + ")");
  }
  const auto lf = stats::least_squares(lx, fit.log_minus_log_prob);
  fit.slope = lf.slope;
  fit.intercept = lf.intercept;
  fit.r_squared = lf.r_squared;
  return fit;
}

namespace {

std::vector<double> quantile_grid(std::span<const double> samples, std::size_t points, double p_lo, double p_hi,
                                  bool upper) {
  if (samples.empty() || points < 2 || !(p_lo > 0.0) || !(p_hi > p_lo) || !(p_hi < 1.0)) {
    throw Error(Errc::invalid_argument, "tail grid: bad parameters");
  }
  std::vector<double> sorted(samples.begin(), samples.end());
  std::sort(sorted.begin(), sorted.end());
  const double n = static_cast<double>(sorted.size());
  std::vector<double> grid;
  for (std::size_t i = 0; i < points; ++i) {
    const double f = static_cast<double>(i) / static_cast<double>(points - 1);
    const double p = std::exp(std::log(p_lo) + f * (std::log(p_hi) - std::log(p_lo)));
    const double q = upper ? 1.0 - p : p;
    const auto k = static_cast<std::size_t>(std::clamp(std::ceil(q * n - 1e-9) - 1.0, 0.0, n - 1.0));
    grid.push_back(sorted[k]);
  }
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
  return grid;
}

}  // namespace

std::vector<double> lower_tail_grid(std::span<const double> samples, std::size_t points, double p_lo, double p_hi) {
  return quantile_grid(samples, points, p_lo, p_hi, false);
}

std::vector<double> upper_tail_grid(std::span<const double> samples, std::size_t points, double p_lo, double p_hi) {
  return quantile_grid(samples, points, p_lo, p_hi, true);
}

}  // namespace cebp
