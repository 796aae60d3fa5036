#include "cebp/simulator.hpp"

#include <cmath>
#include <string>

#include "cebp/error.hpp"

namespace cebp {

void validate_config(const SimulationConfig& config) {
  if (config.depth < 1) throw Error(Errc::invalid_argument, "depth must be >= 1");
  if (config.durations.mode == DurationMode::sampled && config.durations.w_generations < 1) {
    throw Error(Errc::invalid_argument, "sampled durations need w_generations >= 1");
  }
  if (config.root_mode == RootMode::tile && !(config.target_horizon > 0.0)) {
    throw Error(Errc::invalid_argument, "tile mode needs target_horizon > 0");
  }
  if (config.node_budget < 1) throw Error(Errc::invalid_argument, "node_budget must be >= 1");
}

SamplePath build_path(const CrossingTree& tree) {
  if (!tree.has_durations()) throw Error(Errc::missing_durations, "assign durations before building a path");
  const auto leaves = tree.leaves();
  const double step = std::ldexp(1.0, tree.root_level() - tree.depth());
  SamplePath p;
  p.resolution_level = tree.root_level() - tree.depth();
  if (const auto mu = tree.mu()) {
    p.mu = *mu;
    p.hurst = std::log(2.0) / std::log(*mu);
  }
  p.times.reserve(leaves.size() + 1);
  p.values.reserve(leaves.size() + 1);
  p.times.push_back(tree.node(tree.root()).start_time);
  p.values.push_back(0.0);
  double v = 0.0;
  for (const auto& leaf : leaves) {
    v += sign(leaf.orientation) * step;
    p.times.push_back(leaf.start_time + leaf.duration);
    p.values.push_back(v);
  }
  return p;
}

SimulationResult simulate_detailed(const SimulationConfig& config) {
  validate_config(config);
  const auto dist = make_offspring(config.offspring);
  SimulationResult result;
  std::uint64_t nodes_used = 0;
  for (std::uint64_t r = 0;; ++r) {
    Orientation orient = Orientation::up;
    if (config.root_mode == RootMode::tile) {
      Rng o = make_stream(config.seed, StreamTag::tile_orientation, r);
      orient = coin(o) ? Orientation::up : Orientation::down;
    }
    Rng tree_rng = make_stream(config.seed, StreamTag::tree, r);
    auto tree = expand_tree(dist, orient, config.depth, tree_rng, config.node_budget - nodes_used);
    nodes_used += tree.size();
    Rng dur_rng = make_stream(config.seed, StreamTag::durations, r);
    assign_durations(tree, dist, config.durations, dur_rng);
    const SamplePath piece = build_path(tree);
    if (result.path.times.empty()) {
      result.path = piece;
    } else {
      const double t_off = result.path.times.back();
      const double v_off = result.path.values.back();
      for (std::size_t i = 1; i < piece.size(); ++i) {
        result.path.times.push_back(t_off + piece.times[i]);
        result.path.values.push_back(v_off + piece.values[i]);
      }
    }
    result.trees.push_back(std::move(tree));
    if (config.root_mode == RootMode::single) break;
    if (result.path.times.back() >= config.target_horizon) break;
    if (nodes_used >= config.node_budget) {
      throw Error(Errc::node_budget_exceeded, "tile mode exhausted the node budget before reaching the horizon");
    }
  }
  return result;
}

SamplePath simulate(const SimulationConfig& config) { return simulate_detailed(config).path; }

}  // namespace cebp
