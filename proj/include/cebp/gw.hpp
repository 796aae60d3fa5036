#pragma once

// Galton-Watson side of the construction: mean offspring matrix, the
// moment and residual-dominance conditions on Z, and the normed
// population limit W.

#include <array>
#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "cebp/offspring.hpp"
#include "cebp/tail_fit.hpp"

namespace cebp {

/// Two-type mean offspring matrix, rows indexed by parent orientation (+, -),
/// columns by child orientation (+, -).
struct MeanMatrix {
  double mu_plus = 0.0;
  double mu_minus = 0.0;
  std::array<std::array<double, 2>, 2> entries{};
  double dominant_eigenvalue = 0.0;
  double second_eigenvalue = 0.0;
  /// Normalised to sum to one.
  std::array<double, 2> left_eigenvector{};
  /// Normalised so that left . right = 1.
  std::array<double, 2> right_eigenvector{};
};

MeanMatrix mean_offspring_matrix(double mu_plus, double mu_minus);

struct GwAssumptionReport {
  double mu = 0.0;
  bool mu_supercritical = false;
  double e_z_log_z = 0.0;
  bool e_z_log_z_finite = false;
  bool pass = false;
};

/// Never throws.
GwAssumptionReport check_assumption_gw(const OffspringDistribution& dist) noexcept;

struct DominanceCheckResult {
  std::optional<int> zeta;
  std::pair<int, int> checked_y_range{0, 0};
  /// (y, z) pairs that fail for the largest zeta tried; empty when zeta is set.
  std::vector<std::pair<int, int>> violations;
};

/// Smallest zeta in [0, zeta_max] with P(Z - y > z | Z > y) <= P(Z + zeta > z)
/// for every y in [0, y_max] and z in [0, max_z]. y_max defaults to max_z - 1.
DominanceCheckResult check_assumption_z(const OffspringDistribution& dist, int zeta_max,
                                        std::optional<int> y_max = std::nullopt);

struct WEnsemble {
  int generations = 0;
  std::vector<double> samples;
  FamilySpec source;
  double mu = 0.0;
  double hurst = 0.0;
};

struct WSampleOptions {
  /// DEPTH_OVERFLOW when mu^k exceeds this. Populations are counted, not
  /// materialised, so the cap only guards integer range.
  double population_cap = 1e15;
  unsigned workers = 1;
};

/// count samples of N_k / mu^k, sample i drawn from substream (seed, w_sample, i).
WEnsemble sample_W(const OffspringDistribution& dist, int generations, std::size_t count, std::uint64_t seed,
                   const WSampleOptions& options = {});

/// One draw of N_k / mu^k from the caller's stream.
double sample_W_one(const OffspringDistribution& dist, int generations, Rng& rng);

/// Fit of log(-log P(W < x)) against log x; target exponent -H/(1-H).
TailFit w_left_tail_fit(const WEnsemble& ensemble, std::span<const double> x_grid);

/// KS distance between ensembles at k and k + 2 generations (convergence check).
double w_convergence_ks(const OffspringDistribution& dist, int generations, std::size_t count, std::uint64_t seed,
                        const WSampleOptions& options = {});

}  // namespace cebp
