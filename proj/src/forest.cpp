#include "cebp/forest.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "cebp/error.hpp"

namespace cebp {
namespace {

struct LevelPassages {
  std::vector<Passage> passages;
  std::vector<long long> lattice;       // value index in units of 2^level from the start value
  std::vector<std::uint32_t> finer_at;  // index into the next finer level's passages
};

LevelPassages finest_passages(const SamplePath& path, int level) {
  if (path.size() < 2) throw Error(Errc::invalid_argument, "path needs at least two knots");
  if (level < path.resolution_level) {
    throw Error(Errc::level_too_fine, "level " + std::to_string(level) + " is below the path resolution " +
                                          std::to_string(path.resolution_level));
  }
  const double h = std::ldexp(1.0, level);
  const double x0 = path.values.front();
  LevelPassages out;
  out.passages.push_back({path.times.front(), x0});
  out.lattice.push_back(0);
  long long k = 0;
  for (std::size_t i = 0; i + 1 < path.size(); ++i) {
    const double ta = path.times[i], tb = path.times[i + 1];
    const double va = path.values[i], vb = path.values[i + 1];
    for (;;) {
      double target;
      long long next;
      if (vb > va && vb >= x0 + static_cast<double>(k + 1) * h) {
        next = k + 1;
      } else if (vb < va && vb <= x0 + static_cast<double>(k - 1) * h) {
        next = k - 1;
      } else {
        break;
      }
      target = x0 + static_cast<double>(next) * h;
      const double t = target == vb ? tb : ta + (tb - ta) * ((target - va) / (vb - va));
      out.passages.push_back({t, target});
      out.lattice.push_back(next);
      k = next;
    }
  }
  return out;
}

LevelPassages coarsen(const LevelPassages& fine) {
  LevelPassages out;
  out.passages.push_back(fine.passages.front());
  out.lattice.push_back(0);
  out.finer_at.push_back(0);
  long long anchor = 0;
  for (std::size_t j = 1; j < fine.lattice.size(); ++j) {
    const long long k = fine.lattice[j];
    if (k == 2 * anchor + 2 || k == 2 * anchor - 2) {
      anchor = k / 2;
      out.passages.push_back(fine.passages[j]);
      out.lattice.push_back(anchor);
      out.finer_at.push_back(static_cast<std::uint32_t>(j));
    }
  }
  return out;
}

CrossingLevel records_of(int level, const LevelPassages& lp) {
  CrossingLevel cl;
  cl.level = level;
  const auto& p = lp.passages;
  cl.records.reserve(p.size() > 0 ? p.size() - 1 : 0);
  for (std::size_t k = 0; k + 1 < p.size(); ++k) {
    CrossingRecord r;
    r.start_time = p[k].time;
    r.end_time = p[k + 1].time;
    r.orientation = lp.lattice[k + 1] > lp.lattice[k] ? Orientation::up : Orientation::down;
    r.duration = r.end_time - r.start_time;
    if (!lp.finer_at.empty()) {
      r.first_subrecord = lp.finer_at[k];
      r.subcrossing_count = lp.finer_at[k + 1] - lp.finer_at[k];
    }
    cl.records.push_back(r);
  }
  return cl;
}

}  // namespace

const CrossingLevel& CrossingForest::at(int level) const {
  if (level < base_level || level > top_level()) throw Error(Errc::invalid_argument, "level outside forest");
  return levels[static_cast<std::size_t>(level - base_level)];
}

std::vector<Passage> extract_passage_times(const SamplePath& path, int level) {
  return finest_passages(path, level).passages;
}

CrossingForest extract_crossing_forest(const SamplePath& path, int lo, int hi) {
  if (hi < lo) throw Error(Errc::invalid_argument, "empty level range");
  CrossingForest f;
  f.base_level = lo;
  LevelPassages cur = finest_passages(path, lo);
  f.levels.push_back(records_of(lo, cur));
  for (int n = lo + 1; n <= hi; ++n) {
    cur = coarsen(cur);
    f.levels.push_back(records_of(n, cur));
  }
  if (f.levels.back().records.empty()) {
    throw Error(Errc::no_complete_crossing, "no complete crossing at level " + std::to_string(hi));
  }
  return f;
}

std::pair<int, int> feasible_level_range(const SamplePath& path) {
  const int lo = path.resolution_level;
  LevelPassages cur = finest_passages(path, lo);
  if (cur.passages.size() < 2) throw Error(Errc::no_complete_crossing, "path never reaches a new lattice point");
  int hi = lo;
  for (;;) {
    LevelPassages next = coarsen(cur);
    if (next.passages.size() < 2) break;
    cur = std::move(next);
    ++hi;
  }
  return {lo, hi};
}

std::optional<std::string> validate_forest(const CrossingForest& forest) {
  for (std::size_t li = 0; li < forest.levels.size(); ++li) {
    const auto& lv = forest.levels[li];
    const std::string where = "level " + std::to_string(lv.level) + ": ";
    for (std::size_t k = 0; k < lv.records.size(); ++k) {
      const auto& r = lv.records[k];
      if (!(r.end_time >= r.start_time)) return where + "record ends before it starts";
      if (k > 0 && lv.records[k - 1].end_time != r.start_time) return where + "records not contiguous";
      if (li == 0) continue;
      const auto& sub = forest.levels[li - 1].records;
      if (r.subcrossing_count < 2 || r.subcrossing_count % 2 != 0) return where + "subcrossing count not even >= 2";
      if (r.first_subrecord + r.subcrossing_count > sub.size()) return where + "subrecords out of range";
      if (sub[r.first_subrecord].start_time != r.start_time) return where + "first subrecord does not start with parent";
      if (sub[r.first_subrecord + r.subcrossing_count - 1].end_time != r.end_time) {
        return where + "last subrecord does not end with parent";
      }
      int net = 0;
      for (std::uint32_t c = 0; c < r.subcrossing_count; ++c) net += sign(sub[r.first_subrecord + c].orientation);
      if (net != 2 * sign(r.orientation)) return where + "subcrossings do not add up to the parent's displacement";
    }
  }
  return std::nullopt;
}

TreeComparison compare_forest_to_tree(const CrossingForest& forest, const CrossingTree& tree) {
  TreeComparison c;
  auto fail = [&](bool& flag, const std::string& why) {
    flag = false;
    if (!c.first_mismatch) c.first_mismatch = why;
  };
  for (int g = 0; g <= tree.depth(); ++g) {
    const int level = tree.root_level() - g;
    if (level < forest.base_level || level > forest.top_level()) continue;
    const auto gen = tree.generation(g);
    const auto& recs = forest.at(level).records;
    const std::string where = "generation " + std::to_string(g) + ": ";
    if (gen.size() != recs.size()) {
      fail(c.counts_match, where + std::to_string(recs.size()) + " records vs " + std::to_string(gen.size()) + " nodes");
      continue;
    }
    for (std::size_t k = 0; k < gen.size(); ++k) {
      const auto& nd = gen[k];
      const auto& r = recs[k];
      if (nd.orientation != r.orientation) fail(c.orientations_match, where + "orientation differs at " + std::to_string(k));
      if (level > forest.base_level && nd.child_count != r.subcrossing_count) {
        fail(c.counts_match, where + "subcrossing count differs at " + std::to_string(k));
      }
      if (tree.has_durations()) {
        c.max_time_error = std::max(c.max_time_error, std::abs(nd.start_time - r.start_time));
        c.max_time_error = std::max(c.max_time_error, std::abs(nd.start_time + nd.duration - r.end_time));
      }
    }
  }
  return c;
}

}  // namespace cebp
