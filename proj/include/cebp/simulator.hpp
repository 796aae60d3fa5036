#pragma once

#include <cstdint>
#include <vector>

#include "cebp/crossing_tree.hpp"
#include "cebp/offspring.hpp"
#include "cebp/path.hpp"

namespace cebp {

enum class RootMode { single, tile };

struct SimulationConfig {
  FamilySpec offspring;
  int depth = 10;
  DurationSpec durations;
  RootMode root_mode = RootMode::single;
  /// Tile mode only: keep adding level-0 crossings until this much time is covered.
  double target_horizon = 1.0;
  std::uint64_t seed = 0;
  std::uint64_t node_budget = kDefaultNodeBudget;
};

/// Throws INVALID_ARGUMENT on a bad config.
void validate_config(const SimulationConfig& config);

/// Knots at the leaf passage times of a duration-assigned tree rooted at
/// level 0. Throws MISSING_DURATIONS.
SamplePath build_path(const CrossingTree& tree);

struct SimulationResult {
  SamplePath path;
  /// One tree per level-0 crossing, in time order.
  std::vector<CrossingTree> trees;
};

/// Root crossing r uses streams (seed, tree, r) for structure, (seed,
/// durations, r) for sampled leaf durations and (seed, tile_orientation, r)
/// for its orientation in tile mode (single mode roots are up).
SimulationResult simulate_detailed(const SimulationConfig& config);
SamplePath simulate(const SimulationConfig& config);

}  // namespace cebp
