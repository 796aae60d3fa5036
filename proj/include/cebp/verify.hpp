#pragma once

// Monte Carlo experiments behind `cebp verify` and the acceptance binary.
// Each suite returns per-criterion verdicts with the fitted numbers.

#include <string>
#include <vector>

#include "cebp/report.hpp"

namespace cebp::verify {

using report::Json;

struct Criterion {
  std::string id;
  std::string description;
  bool pass = false;
  Json numbers = Json::object();
};

struct Verdict {
  std::string suite;
  Json config = Json::object();
  std::vector<Criterion> criteria;

  bool pass() const;
};

Json to_json(const Verdict& v, std::uint64_t seed);

/// Suite names accepted by run_suite().
const std::vector<std::string>& suite_names();

struct WTailOptions {
  std::vector<FamilySpec> families{FamilySpec::geometric(0.5), FamilySpec::geometric(0.25)};
  int generations = 12;
  std::size_t samples = 1'000'000;
  double tolerance = 0.15;
  double min_r_squared = 0.97;
};
Verdict w_tail(const WTailOptions& o, std::uint64_t seed, unsigned workers);

struct IncrementOptions {
  FamilySpec family = FamilySpec::geometric(0.5);
  int depth = 6;
  std::size_t ensemble = 100'000;
  /// Lag as a power of mu: t = mu^-lag_generations.
  int lag_generations = 3;
  double tolerance = 0.15;
};
Verdict increments(const IncrementOptions& o, std::uint64_t seed, unsigned workers);

struct RemainingTimeOptions {
  FamilySpec family = FamilySpec::geometric(0.5);
  int depth = 6;
  int level = -6;
  std::size_t records = 100'000;
  std::size_t records_per_path = 10;
  int w_generations = 6;
  double tolerance = 0.2;
};
Verdict remaining_time(const RemainingTimeOptions& o, std::uint64_t seed, unsigned workers);

struct ModulusOptions {
  std::vector<FamilySpec> families{FamilySpec::geometric(0.5), FamilySpec::geometric(0.25)};
  /// Spatial resolution in binary digits; tree depth is ceil(resolution_bits * H).
  int resolution_bits = 16;
  std::size_t seeds = 50;
  int l_min = 4;
  int l_mid = 8;
  int l_max = 12;
  double band_ratio = 10.0;
  double half_variation = 0.25;
  std::size_t brute_force_paths = 10;
  double brute_force_factor = 3.0;
};
Verdict modulus(const ModulusOptions& o, std::uint64_t seed, unsigned workers);

struct HolderOptions {
  FamilySpec family = FamilySpec::geometric(0.5);
  int resolution_bits = 16;
  std::size_t grid = 1000;
  EpsRange shallow{4, 8};
  EpsRange deep{6, 12};
  double tolerance = 0.05;
};
Verdict holder(const HolderOptions& o, std::uint64_t seed, unsigned workers);

struct ScaleInvarianceOptions {
  FamilySpec family = FamilySpec::geometric(0.5);
  int depth = 5;
  std::size_t paths = 1000;
  int w_generations = 8;
  std::size_t min_crossings = 10'000;
  double max_ks = 0.03;
  /// Negative control: rescale with mu * wrong_mu_factor (2 turns H = 1/2 into 1/3).
  double wrong_mu_factor = 2.0;
  double control_min_ks = 0.1;
};
Verdict scale_invariance(const ScaleInvarianceOptions& o, std::uint64_t seed, unsigned workers);

struct AssumptionOptions {
  FamilySpec family = FamilySpec::geometric(0.5);
  int zeta_max = 10;
  std::optional<int> y_max;
};
Verdict assumptions(const AssumptionOptions& o);

struct RoundTripOptions {
  std::vector<FamilySpec> families{FamilySpec::fixed(2), FamilySpec::geometric(0.5), FamilySpec::poisson(1.0)};
  std::size_t seeds = 100;
  int depth = 10;
  double time_tolerance = 1e-9;
};
Verdict round_trip(const RoundTripOptions& o, std::uint64_t seed, unsigned workers);

struct BrownianOptions {
  std::size_t walk_steps = 10'000'000;
  int walk_level_lo = 1;
  int walk_level_hi = 6;
  int cebp_depth = 9;
  double max_tv = 0.05;
  double hurst_tolerance = 0.02;
};
Verdict brownian(const BrownianOptions& o, std::uint64_t seed);

/// Simulated paths for an ensemble; member i uses seed derive_seed(seed, ensemble, i).
SimulationConfig member_config(const SimulationConfig& base, std::uint64_t seed, std::size_t index);

/// Tree depth giving about 2^bits leaf crossings: ceil(bits * H).
int depth_for_resolution(const OffspringDistribution& dist, int bits);

}  // namespace cebp::verify
