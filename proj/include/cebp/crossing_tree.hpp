#pragma once

// Arena-stored crossing tree. Nodes are laid out generation by generation,
// left to right in path order, so a generation is a contiguous id range and
// a node's position is its offset inside that range. Children of a node are
// contiguous as well.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cebp/offspring.hpp"
#include "cebp/rng.hpp"

namespace cebp {

enum class Orientation : std::uint8_t { up, down };

constexpr Orientation flip(Orientation o) noexcept { return o == Orientation::up ? Orientation::down : Orientation::up; }
constexpr int sign(Orientation o) noexcept { return o == Orientation::up ? 1 : -1; }
constexpr char symbol(Orientation o) noexcept { return o == Orientation::up ? '+' : '-'; }

using NodeId = std::uint32_t;
inline constexpr NodeId kNoNode = 0xffffffffu;

struct CrossingNode {
  NodeId parent = kNoNode;
  NodeId first_child = kNoNode;
  std::uint32_t child_count = 0;
  std::uint32_t position = 0;
  int level = 0;
  Orientation orientation = Orientation::up;
  /// Only meaningful when the owning tree has_durations().
  double duration = 0.0;
  double start_time = 0.0;

  bool operator==(const CrossingNode&) const = default;
};

inline constexpr std::uint64_t kDefaultNodeBudget = 10'000'000;

class CrossingTree {
 public:
  CrossingTree() = default;

  int root_level() const noexcept { return root_level_; }
  /// Number of generations below the root; leaves sit at root_level - depth.
  int depth() const noexcept { return static_cast<int>(generation_offsets_.size()) - 2; }
  std::size_t size() const noexcept { return nodes_.size(); }
  bool has_durations() const noexcept { return has_durations_; }
  /// Mean offspring count of the generating law, when known.
  std::optional<double> mu() const noexcept { return mu_; }

  const CrossingNode& node(NodeId id) const { return nodes_.at(id); }
  std::span<const CrossingNode> nodes() const noexcept { return nodes_; }
  NodeId root() const noexcept { return 0; }

  /// Nodes of generation g in path order.
  std::span<const CrossingNode> generation(int g) const;
  NodeId generation_begin(int g) const { return generation_offsets_.at(static_cast<std::size_t>(g)); }
  std::span<const CrossingNode> leaves() const { return generation(depth()); }
  std::span<const CrossingNode> children(NodeId id) const;
  /// Orientation vector of the subcrossings (empty for leaves).
  std::vector<Orientation> children_orientations(NodeId id) const;

  /// Rank-adjacent neighbours within a generation; absent at the edges.
  std::optional<NodeId> left_neighbor(NodeId id) const;
  std::optional<NodeId> right_neighbor(NodeId id) const;

  /// Per-node durations and start times, indexed by node id.
  void set_durations(std::span<const double> duration, std::span<const double> start_time);

  /// Node-for-node equality. mu is generator metadata and is not part of
  /// the NDJSON form, so it is not compared.
  bool operator==(const CrossingTree& o) const {
    return root_level_ == o.root_level_ && has_durations_ == o.has_durations_ && nodes_ == o.nodes_ &&
           generation_offsets_ == o.generation_offsets_;
  }

 private:
  friend class CrossingTreeBuilder;

  int root_level_ = 0;
  bool has_durations_ = false;
  std::optional<double> mu_;
  std::vector<CrossingNode> nodes_;
  std::vector<NodeId> generation_offsets_;  // size depth + 2
};

/// Appends nodes generation by generation; used by expansion and parsing.
class CrossingTreeBuilder {
 public:
  CrossingTreeBuilder(int root_level, Orientation root_orientation);

  /// Starts a new generation; subsequent add_children calls fill it.
  void begin_generation();
  /// Appends children of `parent` (which must belong to the previous generation,
  /// in order) with the given orientations.
  void add_children(NodeId parent, std::span<const Orientation> orientations);
  std::size_t size() const noexcept { return tree_.nodes_.size(); }
  Orientation orientation_of(NodeId id) const { return tree_.nodes_.at(id).orientation; }
  void set_mu(std::optional<double> mu) { tree_.mu_ = mu; }
  CrossingTree finish() &&;

 private:
  CrossingTree tree_;
};

/// Excursion pairs (+- or -+, fair coin each) followed by the direct pair
/// matching the parent. Throws INVALID_Z for odd z or z < 2.
std::vector<Orientation> generate_orientations(Orientation parent, int z, Rng& rng);

/// True when `child` has the excursions-then-direct-pair shape for `parent`.
bool valid_subcrossing_pattern(Orientation parent, std::span<const Orientation> child) noexcept;

/// Grows a tree of the given depth. Throws NODE_BUDGET_EXCEEDED when the
/// expected node count (sum of mu^g) or the realised count exceeds the budget.
CrossingTree expand_tree(const OffspringDistribution& dist, Orientation root_orientation, int depth, Rng& rng,
                         std::uint64_t node_budget = kDefaultNodeBudget);

enum class DurationMode { mean, sampled };

struct DurationSpec {
  DurationMode mode = DurationMode::mean;
  /// Generations used for each leaf's W draw in sampled mode.
  int w_generations = 12;
};

/// Leaf durations mu^(root_level - depth) (times an independent W draw in
/// sampled mode); internal nodes get children sums; start times are prefix
/// sums in leaf order starting at 0.
void assign_durations(CrossingTree& tree, const OffspringDistribution& dist, const DurationSpec& spec, Rng& rng);

/// NDJSON, one node per line.
void serialize_tree(const CrossingTree& tree, std::ostream& out);
std::string serialize_tree(const CrossingTree& tree);
/// Throws MALFORMED_RECORD with the 1-based line number.
CrossingTree deserialize_tree(std::istream& in);
CrossingTree deserialize_tree(const std::string& text);

/// First violated structural invariant, or nullopt when the tree is valid.
std::optional<std::string> validate_tree(const CrossingTree& tree);

}  // namespace cebp
