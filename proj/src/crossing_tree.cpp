#include "cebp/crossing_tree.hpp"

#include <cmath>
#include <sstream>
#include <string>

#include <json.hpp>

#include "cebp/error.hpp"
#include "cebp/gw.hpp"

namespace cebp {

std::span<const CrossingNode> CrossingTree::generation(int g) const {
  if (g < 0 || g > depth()) throw Error(Errc::invalid_argument, "generation out of range");
  const auto b = generation_offsets_[static_cast<std::size_t>(g)];
  const auto e = generation_offsets_[static_cast<std::size_t>(g) + 1];
  return std::span<const CrossingNode>(nodes_).subspan(b, e - b);
}

std::span<const CrossingNode> CrossingTree::children(NodeId id) const {
  const auto& n = nodes_.at(id);
  if (n.child_count == 0) return {};
  return std::span<const CrossingNode>(nodes_).subspan(n.first_child, n.child_count);
}

std::vector<Orientation> CrossingTree::children_orientations(NodeId id) const {
  std::vector<Orientation> out;
  for (const auto& c : children(id)) out.push_back(c.orientation);
  return out;
}

std::optional<NodeId> CrossingTree::left_neighbor(NodeId id) const {
  const auto& n = nodes_.at(id);
  if (n.position == 0) return std::nullopt;
  return id - 1;
}

std::optional<NodeId> CrossingTree::right_neighbor(NodeId id) const {
  const auto& n = nodes_.at(id);
  const int g = root_level_ - n.level;
  if (id + 1 >= generation_offsets_[static_cast<std::size_t>(g) + 1]) return std::nullopt;
  return id + 1;
}

void CrossingTree::set_durations(std::span<const double> duration, std::span<const double> start_time) {
  if (duration.size() != nodes_.size() || start_time.size() != nodes_.size()) {
    throw Error(Errc::invalid_argument, "set_durations: size mismatch");
  }
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    nodes_[i].duration = duration[i];
    nodes_[i].start_time = start_time[i];
  }
  has_durations_ = true;
}

CrossingTreeBuilder::CrossingTreeBuilder(int root_level, Orientation root_orientation) {
  tree_.root_level_ = root_level;
  CrossingNode root;
  root.level = root_level;
  root.orientation = root_orientation;
  tree_.nodes_.push_back(root);
  tree_.generation_offsets_ = {0};
}

void CrossingTreeBuilder::begin_generation() {
  tree_.generation_offsets_.push_back(static_cast<NodeId>(tree_.nodes_.size()));
}

void CrossingTreeBuilder::add_children(NodeId parent, std::span<const Orientation> orientations) {
  auto& offs = tree_.generation_offsets_;
  if (offs.size() < 2) throw Error(Errc::invalid_argument, "add_children before begin_generation");
  const NodeId cur_begin = offs.back();
  const NodeId prev_begin = offs[offs.size() - 2];
  if (parent < prev_begin || parent >= cur_begin) {
    throw Error(Errc::invalid_argument, "parent " + std::to_string(parent) + " is not in the previous generation");
  }
  if (tree_.nodes_[parent].child_count != 0) {
    throw Error(Errc::invalid_argument, "children of node " + std::to_string(parent) + " are not contiguous");
  }
  const NodeId first = static_cast<NodeId>(tree_.nodes_.size());
  if (first > cur_begin) {
    const NodeId last_parent = tree_.nodes_[first - 1].parent;
    if (parent <= last_parent) {
      throw Error(Errc::invalid_argument, "parents out of path order at node " + std::to_string(parent));
    }
  }
  if (orientations.empty()) return;
  tree_.nodes_[parent].first_child = first;
  tree_.nodes_[parent].child_count = static_cast<std::uint32_t>(orientations.size());
  const int level = tree_.nodes_[parent].level - 1;
  for (Orientation o : orientations) {
    CrossingNode c;
    c.parent = parent;
    c.level = level;
    c.position = static_cast<std::uint32_t>(tree_.nodes_.size() - cur_begin);
    c.orientation = o;
    tree_.nodes_.push_back(c);
  }
}

CrossingTree CrossingTreeBuilder::finish() && {
  auto& offs = tree_.generation_offsets_;
  if (offs.size() > 1 && offs.back() == tree_.nodes_.size()) offs.pop_back();
  offs.push_back(static_cast<NodeId>(tree_.nodes_.size()));
  return std::move(tree_);
}

namespace {

void fill_orientations(Orientation parent, int z, Rng& rng, std::vector<Orientation>& out) {
  if (z < 2 || z % 2 != 0) throw Error(Errc::invalid_z, "subcrossing count " + std::to_string(z));
  out.clear();
  const int excursions = z / 2 - 1;
  for (int i = 0; i < excursions; ++i) {
    const Orientation first = coin(rng) ? Orientation::up : Orientation::down;
    out.push_back(first);
    out.push_back(flip(first));
  }
  out.push_back(parent);
  out.push_back(parent);
}

}  // namespace

std::vector<Orientation> generate_orientations(Orientation parent, int z, Rng& rng) {
  std::vector<Orientation> out;
  fill_orientations(parent, z, rng, out);
  return out;
}

bool valid_subcrossing_pattern(Orientation parent, std::span<const Orientation> child) noexcept {
  const std::size_t z = child.size();
  if (z < 2 || z % 2 != 0) return false;
  for (std::size_t i = 0; i + 2 < z; i += 2) {
    if (child[i] == child[i + 1]) return false;
  }
  return child[z - 2] == parent && child[z - 1] == parent;
}

CrossingTree expand_tree(const OffspringDistribution& dist, Orientation root_orientation, int depth, Rng& rng,
                         std::uint64_t node_budget) {
  if (depth < 0) throw Error(Errc::invalid_argument, "depth must be >= 0");
  double expected = 0.0;
  for (int g = 0; g <= depth; ++g) expected += std::pow(dist.mu(), g);
  if (expected > static_cast<double>(node_budget)) {
    throw Error(Errc::node_budget_exceeded, "expected " + std::to_string(expected) + " nodes at depth " +
                                                std::to_string(depth) + ", budget " + std::to_string(node_budget));
  }
  CrossingTreeBuilder b(0, root_orientation);
  b.set_mu(dist.mu());
  std::vector<Orientation> buf;
  NodeId gen_begin = 0;
  for (int g = 1; g <= depth; ++g) {
    const NodeId gen_end = static_cast<NodeId>(b.size());
    b.begin_generation();
    for (NodeId p = gen_begin; p < gen_end; ++p) {
      const int z = dist.sample(rng);
      fill_orientations(b.orientation_of(p), z, rng, buf);
      b.add_children(p, buf);
      if (b.size() > node_budget) {
        throw Error(Errc::node_budget_exceeded, "realised node count exceeded budget " + std::to_string(node_budget));
      }
    }
    gen_begin = gen_end;
  }
  return std::move(b).finish();
}

void assign_durations(CrossingTree& tree, const OffspringDistribution& dist, const DurationSpec& spec, Rng& rng) {
  const auto nodes = tree.nodes();
  const std::size_t n = nodes.size();
  std::vector<double> duration(n, 0.0);
  std::vector<double> start(n, 0.0);
  const double leaf_duration = std::pow(dist.mu(), tree.root_level() - tree.depth());
  const NodeId leaf_begin = tree.generation_begin(tree.depth());
  double t = 0.0;
  for (NodeId i = leaf_begin; i < n; ++i) {
    double d = leaf_duration;
    if (spec.mode == DurationMode::sampled) d *= sample_W_one(dist, spec.w_generations, rng);
    duration[i] = d;
    start[i] = t;
    t += d;
  }
  for (NodeId i = leaf_begin; i-- > 0;) {
    const auto& node = nodes[i];
    double s = 0.0;
    for (std::uint32_t k = 0; k < node.child_count; ++k) s += duration[node.first_child + k];
    duration[i] = s;
    start[i] = start[node.first_child];
  }
  tree.set_durations(duration, start);
}

void serialize_tree(const CrossingTree& tree, std::ostream& out) {
  const auto nodes = tree.nodes();
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const auto& nd = nodes[i];
    nlohmann::ordered_json j;
    j["id"] = i;
    j["parent_id"] = nd.parent == kNoNode ? nlohmann::ordered_json(nullptr) : nlohmann::ordered_json(nd.parent);
    j["level"] = nd.level;
    j["position"] = nd.position;
    j["orientation"] = std::string(1, symbol(nd.orientation));
    j["z"] = nd.child_count;
    if (tree.has_durations()) {
      j["duration"] = nd.duration;
      j["start_time"] = nd.start_time;
    }
    out << j.dump() << '\n';
  }
}

std::string serialize_tree(const CrossingTree& tree) {
  std::ostringstream os;
  serialize_tree(tree, os);
  return os.str();
}

namespace {

struct Record {
  std::size_t line;
  std::optional<NodeId> parent;
  int level;
  std::uint32_t position;
  Orientation orientation;
  std::uint32_t z;
  std::optional<double> duration;
  std::optional<double> start_time;
};

[[noreturn]] void malformed(std::size_t line, const std::string& why) {
  throw Error(Errc::malformed_record, "line " + std::to_string(line) + ": " + why);
}

Record parse_record(const std::string& text, std::size_t line, std::size_t expected_id) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    malformed(line, e.what());
  }
  if (!j.is_object()) malformed(line, "record is not an object");
  try {
    Record r;
    r.line = line;
    if (j.at("id").get<std::size_t>() != expected_id) malformed(line, "ids must be 0,1,2,... in order");
    if (!j.at("parent_id").is_null()) r.parent = j.at("parent_id").get<NodeId>();
    r.level = j.at("level").get<int>();
    r.position = j.at("position").get<std::uint32_t>();
    const auto o = j.at("orientation").get<std::string>();
    if (o == "+") {
      r.orientation = Orientation::up;
    } else if (o == "-") {
      r.orientation = Orientation::down;
    } else {
      malformed(line, "orientation must be \"+\" or \"-\"");
    }
    r.z = j.at("z").get<std::uint32_t>();
    const bool has_d = j.contains("duration");
    const bool has_s = j.contains("start_time");
    if (has_d != has_s) malformed(line, "duration and start_time must appear together");
    if (has_d) {
      r.duration = j.at("duration").get<double>();
      r.start_time = j.at("start_time").get<double>();
    }
    return r;
  } catch (const nlohmann::json::exception& e) {
    malformed(line, e.what());
  }
}

}  // namespace

CrossingTree deserialize_tree(std::istream& in) {
  std::vector<Record> recs;
  std::string text;
  std::size_t line = 0;
  while (std::getline(in, text)) {
    ++line;
    if (!text.empty() && text.back() == '\r') text.pop_back();
    if (text.empty()) malformed(line, "empty line");
    recs.push_back(parse_record(text, line, recs.size()));
  }
  if (recs.empty()) malformed(1, "empty stream");
  if (recs[0].parent) malformed(recs[0].line, "first record must be the root (parent_id null)");
  const bool timed = recs[0].duration.has_value();

  CrossingTreeBuilder b(recs[0].level, recs[0].orientation);
  std::vector<Orientation> buf;
  std::size_t i = 1;
  while (i < recs.size()) {
    const auto& r = recs[i];
    if (!r.parent) malformed(r.line, "only the root may lack a parent");
    if (*r.parent >= i) malformed(r.line, "parent must precede child");
    if (r.level != recs[i - 1].level && r.level != recs[i - 1].level - 1) malformed(r.line, "level out of order");
    if (i == 1 || r.level != recs[i - 1].level) b.begin_generation();
    const NodeId p = *r.parent;
    buf.clear();
    std::size_t j = i;
    while (j < recs.size() && recs[j].parent == r.parent) {
      if (recs[j].level != r.level) malformed(recs[j].line, "siblings on different levels");
      buf.push_back(recs[j].orientation);
      ++j;
    }
    try {
      b.add_children(p, buf);
    } catch (const Error& e) {
      malformed(r.line, e.what());
    }
    i = j;
  }
  CrossingTree tree = std::move(b).finish();
  std::vector<double> dur, start;
  for (std::size_t k = 0; k < recs.size(); ++k) {
    const auto& r = recs[k];
    const auto& nd = tree.node(static_cast<NodeId>(k));
    if (nd.level != r.level) malformed(r.line, "level inconsistent with tree structure");
    if (nd.position != r.position) malformed(r.line, "position inconsistent with tree structure");
    if (nd.child_count != r.z) malformed(r.line, "z does not match the number of child records");
    if (r.duration.has_value() != timed) malformed(r.line, "durations present on some records only");
    if (timed) {
      dur.push_back(*r.duration);
      start.push_back(*r.start_time);
    }
  }
  if (timed) tree.set_durations(dur, start);
  return tree;
}

CrossingTree deserialize_tree(const std::string& text) {
  std::istringstream is(text);
  return deserialize_tree(is);
}

std::optional<std::string> validate_tree(const CrossingTree& tree) {
  const auto nodes = tree.nodes();
  if (nodes.empty()) return "tree has no nodes";
  if (nodes[0].parent != kNoNode) return "root has a parent";
  const int depth = tree.depth();
  for (int g = 0; g <= depth; ++g) {
    const NodeId begin = tree.generation_begin(g);
    const auto gen = tree.generation(g);
    for (std::size_t k = 0; k < gen.size(); ++k) {
      const NodeId id = begin + static_cast<NodeId>(k);
      const auto& nd = gen[k];
      const std::string where = "node " + std::to_string(id) + ": ";
      if (nd.position != k) return where + "position differs from rank in generation";
      if (nd.level != tree.root_level() - g) return where + "level does not match generation";
      if (g > 0) {
        if (nd.parent == kNoNode || nd.parent >= begin || nd.parent < tree.generation_begin(g - 1)) {
          return where + "parent not in previous generation";
        }
        const auto& p = nodes[nd.parent];
        if (id < p.first_child || id >= p.first_child + p.child_count) return where + "not among its parent's children";
      }
      if (g < depth) {
        if (nd.child_count == 0) return where + "internal node without children";
        const auto orient = tree.children_orientations(id);
        if (!valid_subcrossing_pattern(nd.orientation, orient)) return where + "subcrossing orientations malformed";
        for (const auto& c : tree.children(id)) {
          if (c.parent != id) return where + "children not contiguous";
        }
      } else if (nd.child_count != 0) {
        return where + "leaf generation node has children";
      }
      if (tree.has_durations()) {
        if (!(nd.duration >= 0.0) || !std::isfinite(nd.duration)) return where + "invalid duration";
        if (nd.child_count > 0) {
          double s = 0.0;
          double t = nodes[nd.first_child].start_time;
          if (std::abs(t - nd.start_time) > 1e-9 * std::max(1.0, std::abs(nd.start_time))) {
            return where + "first child does not start with parent";
          }
          for (const auto& c : tree.children(id)) {
            if (std::abs(c.start_time - t) > 1e-9 * std::max(1.0, std::abs(t))) return where + "children not contiguous in time";
            t += c.duration;
            s += c.duration;
          }
          if (std::abs(s - nd.duration) > 1e-12 * nd.duration) return where + "duration is not the sum of children";
        }
        if (k > 0 && !(nd.start_time > gen[k - 1].start_time) && g == depth) {
          return where + "leaf start times not strictly increasing";
        }
      }
    }
  }
  return std::nullopt;
}

}  // namespace cebp
