#pragma once

// Estimators and Monte Carlo verifiers that run on sample paths and the
// crossing forests extracted from them.

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <vector>

#include "cebp/forest.hpp"
#include "cebp/path.hpp"
#include "cebp/rng.hpp"
#include "cebp/tail_fit.hpp"

namespace cebp {

// ---------------------------------------------------------------------------
// Offspring mean and Hurst index from subcrossing counts.

struct LevelCount {
  int level;
  std::size_t parents;
  double mean_count;
  double mean_duration;
};

struct HurstEstimate {
  double mu_hat = 0.0;
  double hurst_hat = 0.0;
  /// Delta-method standard error of hurst_hat.
  double stderr_hurst = 0.0;
  double stderr_mu = 0.0;
  std::size_t parents = 0;
  std::vector<LevelCount> per_level;
  /// Slope of log(mean duration) against level; estimates log mu.
  std::optional<double> duration_slope;
  std::optional<double> hurst_hat_duration;
};

/// Needs >= 2 levels and >= 30 complete parent crossings (INSUFFICIENT_CROSSINGS).
HurstEstimate estimate_hurst(const CrossingForest& forest);

/// Pooled relative frequencies of the subcrossing count over all parent levels.
std::map<int, double> subcrossing_pmf(const CrossingForest& forest);

/// Total variation distance between an empirical pmf and pmf(2k) = 2^-k.
double tv_distance_to_geometric_pairs(const std::map<int, double>& pmf);

// ---------------------------------------------------------------------------
// Local regularity.

/// Dyadic scales epsilon = 2^-j for j in [coarsest, finest].
struct EpsRange {
  int coarsest;
  int finest;
};

/// Slope of log sup_{|u-t|<eps} |X(u) - X(t)| against log eps for
/// eps = 2^-j, j in [coarsest, finest]. Windows are clipped to the time
/// span. Throws EPS_RANGE_INFEASIBLE.
double local_holder(const SamplePath& path, double t, EpsRange eps);

struct HolderEstimate {
  EpsRange eps{};
  std::vector<double> grid_times;
  std::vector<double> exponents;
  /// Bins of width bin_width starting at 0; the last bin also takes everything above.
  double bin_width = 0.05;
  std::vector<std::size_t> histogram;
  /// log(count) / log(grid size) per bin; -infinity for empty bins.
  std::vector<double> coarse_spectrum;
  double mean = 0.0;
  double stddev = 0.0;
};

/// Exponents on grid_size equally spaced interior points (grid_size >= 100).
HolderEstimate holder_histogram(const SamplePath& path, std::size_t grid_size, EpsRange eps);

// ---------------------------------------------------------------------------
// Modulus of continuity.

/// delta^H |log delta|^(1-H), natural log.
double modulus_gauge(double delta, double hurst);

struct ModulusReport {
  double hurst = 0.0;
  std::vector<int> levels;
  std::vector<double> deltas;
  /// max over dyadic blocks of |X((m+1)d) - X(md)| and of the block suprema.
  std::vector<double> lattice_increment_max;
  std::vector<double> block_sup_max;
  std::vector<double> ratios;
  double ratio_min = 0.0;
  double ratio_max = 0.0;
  double stability_bound = 10.0;
  bool stable = false;
};

/// Path must live on [0, 1] (see normalize_time). For each dyadic level l
/// the ratio is max_m max(|X((m+1)2^-l) - X(m2^-l)|, Phi_{m,l}) / h_H(2^-l),
/// which brackets the all-pairs supremum within a factor 3. Throws
/// L_RANGE_INFEASIBLE when 2^-l_max is finer than the mean knot spacing.
ModulusReport modulus_ratio(const SamplePath& path, int l_min, int l_max, double hurst, double stability_bound = 10.0);

/// Same quantity from all pairs of knots and dyadic grid points:
/// sup over |t - s| <= 2^-l of |X(t) - X(s)| / h_H(|t - s|). At most
/// kBruteForceMaxSegments segments.
inline constexpr std::size_t kBruteForceMaxSegments = 4096;
ModulusReport modulus_ratio_bruteforce(const SamplePath& path, int l_min, int l_max, double hurst,
                                       double stability_bound = 10.0);

// ---------------------------------------------------------------------------
// Increment and remaining-time tails.

/// Query times are drawn from the first 90% of the span (and so that the
/// lookahead window fits).
inline constexpr double kQueryFraction = 0.9;

struct IncrementSample {
  double plain;  // |X(s+t) - X(s)|
  double sup;    // sup_{u <= t} |X(s+u) - X(s)|
};

IncrementSample sample_increment(const SamplePath& path, double t, Rng& rng);

struct IncrementTailReport {
  double t = 0.0;
  double hurst = 0.0;
  std::size_t samples = 0;
  std::vector<double> lambda_grid;
  std::vector<double> p_plain;
  std::vector<double> p_sup;
  std::size_t sandwich_violations = 0;
  /// log(-log P(plain > lambda)) against log(lambda^(1/H) / t); target H/(1-H).
  TailFit fit;
  std::optional<TailFit> sup_fit;
};

/// Empty lambda_grid: 12 upper-tail quantiles of the plain increments,
/// exceedance probabilities from 10/N to 0.1.
IncrementTailReport increment_tail_from_samples(std::span<const IncrementSample> samples, double hurst, double t,
                                                std::vector<double> lambda_grid = {});

/// One query per path, from stream (seed, query_time, path index).
IncrementTailReport increment_tail(std::span<const SamplePath> paths, double t, std::vector<double> lambda_grid,
                                   std::uint64_t seed, std::size_t min_ensemble = 10'000);

struct RemainingTimeRecord {
  double s = 0.0;
  int n = 0;
  double t_n0 = 0.0;
  double gap = 0.0;
  /// Level-n crossings of the enclosing level-(n+1) crossing completed by t_n0.
  long long y = 0;
  /// Level-n crossings still to come in the enclosing crossing; absent when
  /// the enclosing crossing is not complete in the record.
  std::optional<long long> remaining;
};

/// Record at query time s, or nullopt when no level-n passage follows s.
std::optional<RemainingTimeRecord> remaining_time_record(std::span<const Passage> level_n,
                                                         std::span<const Passage> level_n1, int n, double s);

/// Uniform s from stream rng (first 90% of the span).
std::optional<RemainingTimeRecord> sample_remaining_time(const SamplePath& path, int n, Rng& rng);

struct RemainingTimeReport {
  int n = 0;
  double mu = 0.0;
  double hurst = 0.0;
  std::size_t records = 0;
  std::vector<double> x_grid;
  std::vector<double> p_hat;
  /// log(-log P(gap <= x)) against log(mu^-n x); target -H/(1-H).
  TailFit fit;
  std::map<long long, std::size_t> y_histogram;
  double mean_y = 0.0;
};

/// Empty x_grid: 12 lower-tail quantiles of the gaps from 10/N to 0.1.
RemainingTimeReport remaining_time_tail(std::span<const RemainingTimeRecord> records, double mu,
                                        std::vector<double> x_grid = {});

// ---------------------------------------------------------------------------
// Duration scale invariance.

struct LevelPairKs {
  int level_a;
  int level_b;
  std::size_t n_a;
  std::size_t n_b;
  double ks;
};

struct ScaleInvarianceReport {
  double mu = 0.0;
  std::vector<LevelPairKs> pairs;
  double max_ks = 0.0;
};

/// KS distances between the laws of mu^-n D^n on adjacent levels, pooled
/// over forests; levels with fewer than min_crossings records are skipped.
/// Throws INSUFFICIENT_CROSSINGS when fewer than two levels qualify.
ScaleInvarianceReport duration_scale_invariance(std::span<const CrossingForest> forests, double mu,
                                                std::size_t min_crossings = 100);

}  // namespace cebp
