#include "cebp/gw.hpp"

#include <cmath>
#include <string>

#include "cebp/error.hpp"
#include "cebp/kernels.hpp"
#include "cebp/parallel.hpp"
#include "cebp/stats.hpp"

namespace cebp {

MeanMatrix mean_offspring_matrix(double mu_plus, double mu_minus) {
  if (!(mu_plus > 2.0) || !(mu_minus > 2.0)) {
    throw Error(Errc::mu_not_supercritical, "both mean offspring counts must exceed 2");
  }
  MeanMatrix m;
  m.mu_plus = mu_plus;
  m.mu_minus = mu_minus;
  m.entries = {{{mu_plus / 2 + 1, mu_plus / 2 - 1}, {mu_minus / 2 - 1, mu_minus / 2 + 1}}};

  // Generic 2x2 eigen-solve; the closed forms are checked by the tests.
  const double a = m.entries[0][0], b = m.entries[0][1];
  const double c = m.entries[1][0], d = m.entries[1][1];
  const double half_trace = 0.5 * (a + d);
  const double det = a * d - b * c;
  const double disc = std::sqrt(std::max(0.0, half_trace * half_trace - det));
  m.dominant_eigenvalue = half_trace + disc;
  m.second_eigenvalue = half_trace - disc;
  const double lambda = m.dominant_eigenvalue;

  std::array<double, 2> left{c, lambda - a};
  const double lsum = left[0] + left[1];
  left = {left[0] / lsum, left[1] / lsum};
  std::array<double, 2> right{b, lambda - a};
  const double dot = left[0] * right[0] + left[1] * right[1];
  right = {right[0] / dot, right[1] / dot};
  m.left_eigenvector = left;
  m.right_eigenvector = right;
  return m;
}

GwAssumptionReport check_assumption_gw(const OffspringDistribution& dist) noexcept {
  GwAssumptionReport r;
  r.mu = dist.mu();
  r.mu_supercritical = dist.mu() > 2.0;
  // The pmf is finite after truncation, so the moment is a finite sum.
  double s = 0.0;
  for (const auto& e : dist.pmf()) s += e.p * e.z * std::log(static_cast<double>(e.z));
  r.e_z_log_z = s;
  r.e_z_log_z_finite = std::isfinite(s);
  r.pass = r.mu_supercritical && r.e_z_log_z_finite;
  return r;
}

DominanceCheckResult check_assumption_z(const OffspringDistribution& dist, int zeta_max, std::optional<int> y_max) {
  if (zeta_max < 0) throw Error(Errc::invalid_argument, "zeta_max must be >= 0");
  const int zmax = dist.max_z();
  const int ymax = y_max.value_or(zmax - 1);
  if (ymax < 1) throw Error(Errc::invalid_argument, "y_max must be >= 1");

  // survival[j] = P(Z > j) for j in [0, zmax]; zero beyond, one below zero.
  std::vector<double> point(static_cast<std::size_t>(zmax) + 1, 0.0);
  for (const auto& e : dist.pmf()) point[static_cast<std::size_t>(e.z)] = e.p;
  std::vector<double> survival(static_cast<std::size_t>(zmax) + 1, 0.0);
  double tail = 0.0;
  for (int j = zmax; j >= 0; --j) {
    survival[static_cast<std::size_t>(j)] = tail;
    tail += point[static_cast<std::size_t>(j)];
  }
  auto S = [&](long j) -> double {
    if (j < 0) return 1.0;
    if (j > zmax) return 0.0;
    return survival[static_cast<std::size_t>(j)];
  };

  constexpr double kTol = 1e-12;
  DominanceCheckResult result;
  result.checked_y_range = {0, ymax};
  for (int zeta = 0; zeta <= zeta_max; ++zeta) {
    std::vector<std::pair<int, int>> bad;
    for (int y = 0; y <= ymax; ++y) {
      const double sy = S(y);
      if (sy <= 0.0) continue;
      for (int z = 0; z <= zmax; ++z) {
        const double lhs = S(static_cast<long>(y) + z) / sy;
        const double rhs = S(static_cast<long>(z) - zeta);
        if (lhs > rhs + kTol) bad.emplace_back(y, z);
      }
    }
    if (bad.empty()) {
      result.zeta = zeta;
      result.violations.clear();
      return result;
    }
    result.violations = std::move(bad);
  }
  return result;
}

double sample_W_one(const OffspringDistribution& dist, int generations, Rng& rng) {
  std::uint64_t n = 1;
  for (int g = 0; g < generations; ++g) n = dist.sample_sum(n, rng);
  return static_cast<double>(n) / std::pow(dist.mu(), generations);
}

WEnsemble sample_W(const OffspringDistribution& dist, int generations, std::size_t count, std::uint64_t seed,
                   const WSampleOptions& options) {
  if (generations < 1) throw Error(Errc::invalid_argument, "generations must be >= 1");
  if (count < 1) throw Error(Errc::invalid_argument, "sample count must be >= 1");
  if (std::pow(dist.mu(), generations) > options.population_cap) {
    throw Error(Errc::depth_overflow, "mu^k = " + std::to_string(std::pow(dist.mu(), generations)) +
                                          " exceeds population cap");
  }
  WEnsemble e;
  e.generations = generations;
  e.source = dist.spec();
  e.mu = dist.mu();
  e.hurst = dist.hurst();
  e.samples.resize(count);
  parallel_for(count, options.workers, [&](std::size_t i) {
    Rng rng = make_stream(seed, StreamTag::w_sample, i);
    e.samples[i] = sample_W_one(dist, generations, rng);
  });
  return e;
}

TailFit w_left_tail_fit(const WEnsemble& ensemble, std::span<const double> x_grid) {
  if (x_grid.empty()) throw Error(Errc::insufficient_tail_points, "empty x grid");
  for (std::size_t i = 1; i < x_grid.size(); ++i) {
    if (!(x_grid[i] > x_grid[i - 1])) throw Error(Errc::invalid_argument, "x grid must be strictly increasing");
  }
  if (ensemble.samples.empty()) throw Error(Errc::invalid_argument, "empty ensemble");
  const double n = static_cast<double>(ensemble.samples.size());
  std::vector<double> p(x_grid.size());
  for (std::size_t i = 0; i < x_grid.size(); ++i) {
    p[i] = static_cast<double>(kernels::count_less(ensemble.samples, x_grid[i])) / n;
  }
  const double h = ensemble.hurst;
  return fit_tail(x_grid, p, -h / (1.0 - h));
}

double w_convergence_ks(const OffspringDistribution& dist, int generations, std::size_t count, std::uint64_t seed,
                        const WSampleOptions& options) {
  const auto a = sample_W(dist, generations, count, seed, options);
  const auto b = sample_W(dist, generations + 2, count, mix64(seed + 1), options);
  return stats::ks_distance(a.samples, b.samples);
}

}  // namespace cebp
