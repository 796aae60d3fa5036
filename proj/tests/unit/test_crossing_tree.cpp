#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

#include "cebp/crossing_tree.hpp"
#include "cebp/error.hpp"
#include "cebp/stats.hpp"
#include "generators.hpp"

using namespace cebp;

namespace {

const Orientation U = Orientation::up;
const Orientation D = Orientation::down;

CrossingTree fixed_tree(int depth, bool durations) {
  const auto d = make_offspring(FamilySpec::fixed(2));
  auto rng = make_stream(1, StreamTag::tree);
  auto t = expand_tree(d, U, depth, rng);
  if (durations) assign_durations(t, d, {}, rng);
  return t;
}

}  // namespace

TEST_CASE("orientation patterns") {
  auto rng = make_stream(0, StreamTag::test);
  CHECK(generate_orientations(U, 2, rng) == std::vector{U, U});
  CHECK(generate_orientations(D, 2, rng) == std::vector{D, D});
  int first_up = 0;
  for (int i = 0; i < 1000; ++i) {
    const auto o = generate_orientations(D, 4, rng);
    CHECK((o == std::vector{U, D, D, D} || o == std::vector{D, U, D, D}));
    first_up += o[0] == U;
  }
  CHECK(std::abs(first_up - 500) < 3 * std::sqrt(250.0));
  CHECK_THROWS_AS(generate_orientations(U, 3, rng), Error);
  CHECK_THROWS_AS(generate_orientations(U, 0, rng), Error);
}

TEST_CASE("six subcrossings give four equally likely patterns") {
  auto rng = make_stream(1, StreamTag::test);
  std::map<std::vector<Orientation>, int> freq;
  const int n = 100000;
  for (int i = 0; i < n; ++i) ++freq[generate_orientations(U, 6, rng)];
  CHECK(freq.size() == 4);
  for (const auto& [o, c] : freq) {
    CHECK(valid_subcrossing_pattern(U, o));
    CHECK(std::abs(c / static_cast<double>(n) - 0.25) < 0.01);
  }
}

TEST_CASE("pattern validator") {
  CHECK(valid_subcrossing_pattern(U, std::vector{U, D, U, U}));
  CHECK_FALSE(valid_subcrossing_pattern(U, std::vector{U, U, U, U}));
  CHECK_FALSE(valid_subcrossing_pattern(U, std::vector{D, D}));
  CHECK_FALSE(valid_subcrossing_pattern(D, std::vector{D, D, D}));
  CHECK_FALSE(valid_subcrossing_pattern(U, std::vector<Orientation>{}));
}

TEST_CASE("deterministic expansion sizes") {
  const auto t = fixed_tree(2, false);
  CHECK(t.size() == 21);
  CHECK(t.depth() == 2);
  CHECK(t.generation(1).size() == 4);
  CHECK(t.leaves().size() == 16);
  auto rng = make_stream(2, StreamTag::tree);
  const auto single = expand_tree(make_offspring(FamilySpec::geometric(0.5)), D, 0, rng);
  CHECK(single.size() == 1);
  CHECK(single.node(0).child_count == 0);
  CHECK(single.node(0).orientation == D);
}

TEST_CASE("node budget") {
  auto rng = make_stream(3, StreamTag::tree);
  const auto d = make_offspring(FamilySpec::geometric(0.5));
  try {
    (void)expand_tree(d, U, 40, rng);
    FAIL("expected budget error");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::node_budget_exceeded);
  }
  CHECK_THROWS_AS(expand_tree(d, U, 5, rng, 100), Error);
}

TEST_CASE("mean generation size") {
  const auto d = make_offspring(FamilySpec::geometric(0.5));
  std::vector<double> sizes;
  for (std::uint64_t r = 0; r < 1000; ++r) {
    auto rng = make_stream(r, StreamTag::tree);
    sizes.push_back(static_cast<double>(expand_tree(d, U, 8, rng).leaves().size()));
  }
  const double se = std::sqrt(stats::variance(sizes) / 1000.0);
  CHECK(std::abs(stats::mean(sizes) - std::pow(4.0, 8)) < 3 * se);
}

TEST_CASE("property: structure of expanded trees") {
  std::size_t checked = 0;
  for (std::uint64_t i = 0; checked < 100000; ++i) {
    auto rng = testgen::case_rng(31, i);
    const auto spec = testgen::parametric_family(rng);
    const auto d = make_offspring(spec);
    const int depth = d.mu() > 8 ? 3 : 6;
    auto t = expand_tree(d, coin(rng) ? U : D, depth, rng);
    assign_durations(t, d, {coin(rng) ? DurationMode::mean : DurationMode::sampled, 4}, rng);
    CAPTURE(i);
    REQUIRE(validate_tree(t) == std::nullopt);
    for (NodeId id = 0; id < t.size(); ++id) {
      const auto& nd = t.node(id);
      if (nd.child_count == 0) continue;
      ++checked;
      const auto o = t.children_orientations(id);
      CHECK(valid_subcrossing_pattern(nd.orientation, o));
      const auto ups = std::count(o.begin(), o.end(), U);
      const auto same = nd.orientation == U ? ups : static_cast<long>(o.size()) - ups;
      CHECK(same == static_cast<long>(o.size() / 2 + 1));
      double sum = 0.0;
      for (const auto& c : t.children(id)) sum += c.duration;
      CHECK(std::abs(nd.duration - sum) <= 1e-12 * nd.duration);
    }
    for (int g = 0; g <= t.depth(); ++g) {
      double total = 0.0;
      double prev = -1.0;
      for (const auto& n : t.generation(g)) {
        total += n.duration;
        CHECK(n.start_time > prev);
        prev = n.start_time;
      }
      CHECK(std::abs(total - t.node(0).duration) <= 1e-9 * t.node(0).duration);
    }
  }
}

TEST_CASE("mean-mode durations of a deterministic tree") {
  const auto t = fixed_tree(3, true);
  for (const auto& leaf : t.leaves()) CHECK(leaf.duration == std::pow(4.0, -3));
  CHECK(t.node(0).duration == 1.0);
  CHECK(t.node(0).start_time == 0.0);
}

TEST_CASE("neighbours within a generation") {
  const auto t = fixed_tree(2, false);
  const NodeId first = t.generation_begin(2);
  CHECK_FALSE(t.left_neighbor(first).has_value());
  CHECK(t.right_neighbor(first) == first + 1);
  // across a subtree boundary
  CHECK(t.right_neighbor(first + 3) == first + 4);
  CHECK(t.node(first + 4).parent != t.node(first + 3).parent);
  CHECK_FALSE(t.right_neighbor(static_cast<NodeId>(t.size() - 1)).has_value());
  CHECK_FALSE(t.left_neighbor(0).has_value());
}

TEST_CASE("NDJSON round trip") {
  const auto plain = fixed_tree(2, false);
  const auto text = serialize_tree(plain);
  CHECK(std::count(text.begin(), text.end(), '\n') == 21);
  CHECK(text.find("duration") == std::string::npos);
  const auto back = deserialize_tree(text);
  CHECK(back == plain);
  CHECK_FALSE(back.has_durations());

  const auto d = make_offspring(FamilySpec::geometric(0.5));
  auto rng = make_stream(8, StreamTag::tree);
  auto t = expand_tree(d, D, 5, rng);
  assign_durations(t, d, {DurationMode::sampled, 6}, rng);
  CHECK(deserialize_tree(serialize_tree(t)) == t);
}

TEST_CASE("malformed NDJSON") {
  auto code_line = [](const std::string& text) -> std::string {
    try {
      (void)deserialize_tree(text);
    } catch (const Error& e) {
      CHECK(e.code() == Errc::malformed_record);
      return e.what();
    }
    FAIL("expected MALFORMED_RECORD");
    return {};
  };
  CHECK(code_line("").find("MALFORMED_RECORD") != std::string::npos);
  auto text = serialize_tree(fixed_tree(1, false));
  const auto cut = text.find('\n', text.find('\n') + 1);
  text.insert(cut + 1, "{not json\n");
  CHECK(code_line(text).find("line 3") != std::string::npos);
}

TEST_CASE("validator reports broken duration additivity") {
  auto t = fixed_tree(1, true);
  std::vector<double> dur(t.size()), start(t.size());
  for (NodeId i = 0; i < t.size(); ++i) {
    dur[i] = t.node(i).duration;
    start[i] = t.node(i).start_time;
  }
  dur[0] = 2.0;
  t.set_durations(dur, start);
  CHECK(validate_tree(t).has_value());
}
