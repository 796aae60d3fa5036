#pragma once

// Crossing structure read back from a path: passage times at each level
// and the nested crossing records between them.

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "cebp/crossing_tree.hpp"
#include "cebp/path.hpp"

namespace cebp {

struct Passage {
  double time;
  double value;
};

/// Passage times of the lattice X(t0) + 2^n Z. The first entry is the path
/// start; each later one is the first time the interpolated path reaches a
/// lattice point other than the previous one. Throws LEVEL_TOO_FINE.
std::vector<Passage> extract_passage_times(const SamplePath& path, int level);

struct CrossingRecord {
  double start_time = 0.0;
  double end_time = 0.0;
  Orientation orientation = Orientation::up;
  /// Number of level-(n-1) records inside; 0 at the base level.
  std::uint32_t subcrossing_count = 0;
  double duration = 0.0;
  /// Index of the first contained record one level down (base level: 0).
  std::uint32_t first_subrecord = 0;
};

struct CrossingLevel {
  int level = 0;
  std::vector<CrossingRecord> records;
};

struct CrossingForest {
  int base_level = 0;
  /// Ascending from base_level, contiguous.
  std::vector<CrossingLevel> levels;

  int top_level() const { return base_level + static_cast<int>(levels.size()) - 1; }
  const CrossingLevel& at(int level) const;
};

/// Levels [lo, hi] inclusive. Trailing crossings that are not complete by
/// the end of the path are dropped at every level. Errors: LEVEL_TOO_FINE,
/// NO_COMPLETE_CROSSING (nothing completes at hi), INVALID_ARGUMENT.
CrossingForest extract_crossing_forest(const SamplePath& path, int lo, int hi);

/// Finest admissible level and the coarsest level that still has a
/// complete crossing.
std::pair<int, int> feasible_level_range(const SamplePath& path);

/// Violated nesting/contiguity invariant, if any.
std::optional<std::string> validate_forest(const CrossingForest& forest);

struct TreeComparison {
  bool counts_match = true;
  bool orientations_match = true;
  double max_time_error = 0.0;
  std::optional<std::string> first_mismatch;
};

/// Generation g of the tree against forest level root_level - g, for every
/// generation the forest covers.
TreeComparison compare_forest_to_tree(const CrossingForest& forest, const CrossingTree& tree);

}  // namespace cebp
