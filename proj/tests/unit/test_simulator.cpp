#include <doctest.h>

#include <cmath>

#include "cebp/error.hpp"
#include "cebp/forest.hpp"
#include "cebp/simulator.hpp"
#include "cebp/stats.hpp"

using namespace cebp;

namespace {

SimulationConfig config(FamilySpec spec, int depth, std::uint64_t seed) {
  SimulationConfig c;
  c.offspring = spec;
  c.depth = depth;
  c.seed = seed;
  return c;
}

}  // namespace

TEST_CASE("one-generation path by hand") {
  CrossingTreeBuilder b(0, Orientation::up);
  b.begin_generation();
  const std::vector o{Orientation::up, Orientation::down, Orientation::up, Orientation::up};
  b.add_children(0, o);
  auto tree = std::move(b).finish();
  auto rng = make_stream(0, StreamTag::test);
  assign_durations(tree, make_offspring(FamilySpec::fixed(2)), {}, rng);
  const auto p = build_path(tree);
  CHECK(p.times == std::vector{0.0, 0.25, 0.5, 0.75, 1.0});
  CHECK(p.values == std::vector{0.0, 0.5, 0.0, 0.5, 1.0});
  CHECK(p.resolution_level == -1);
}

TEST_CASE("path needs durations") {
  auto rng = make_stream(0, StreamTag::test);
  const auto tree = expand_tree(make_offspring(FamilySpec::fixed(2)), Orientation::up, 2, rng);
  try {
    (void)build_path(tree);
    FAIL("expected error");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::missing_durations);
  }
}

TEST_CASE("simulated paths are crossings of one unit with exact steps") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto p = simulate(config(FamilySpec::geometric(0.5), 6, seed));
    CHECK(p.values.front() == 0.0);
    CHECK(p.values.back() == 1.0);
    CHECK(p.resolution_level == -6);
    REQUIRE(p.hurst.has_value());
    CHECK(*p.hurst == doctest::Approx(0.5));
    for (std::size_t i = 1; i < p.size(); ++i) {
      CHECK(std::abs(p.values[i] - p.values[i - 1]) == std::ldexp(1.0, -6));
      CHECK(p.times[i] > p.times[i - 1]);
      if (i + 1 < p.size()) CHECK(std::abs(p.values[i]) < 1.0);
    }
  }
}

TEST_CASE("simulation is deterministic in the seed") {
  auto c = config(FamilySpec::poisson(1.0), 7, 99);
  c.durations.mode = DurationMode::sampled;
  c.durations.w_generations = 5;
  CHECK(simulate(c) == simulate(c));
  auto c2 = c;
  c2.seed = 100;
  CHECK_FALSE(simulate(c) == simulate(c2));
}

TEST_CASE("tile mode with deterministic branching covers the horizon with one root") {
  auto c = config(FamilySpec::fixed(2), 4, 1);
  c.root_mode = RootMode::tile;
  c.target_horizon = 1.0;
  const auto r = simulate_detailed(c);
  CHECK(r.trees.size() == 1);
  CHECK(r.path.end_time() == 1.0);
  c.target_horizon = 2.5;
  const auto r3 = simulate_detailed(c);
  CHECK(r3.trees.size() == 3);
  CHECK(r3.path.end_time() == 3.0);
  CHECK(std::abs(r3.path.values.back()) <= 3.0);
}

TEST_CASE("root duration has mean one in sampled mode") {
  std::vector<double> d;
  for (std::uint64_t seed = 0; seed < 10000; ++seed) {
    auto c = config(FamilySpec::geometric(0.5), 2, seed);
    c.durations = {DurationMode::sampled, 8};
    d.push_back(simulate(c).end_time());
  }
  CHECK(std::abs(stats::mean(d) - 1.0) < 0.02);
}

TEST_CASE("sampled leaf durations match a deeper mean-mode tree") {
  const auto dist = make_offspring(FamilySpec::geometric(0.5));
  std::vector<double> sampled, deep;
  for (std::uint64_t r = 0; r < 20000; ++r) {
    auto rng = make_stream(r, StreamTag::test);
    auto t = expand_tree(dist, Orientation::up, 2, rng);
    assign_durations(t, dist, {DurationMode::sampled, 4}, rng);
    sampled.push_back(t.node(0).duration);
    auto rng2 = make_stream(r, StreamTag::test, 1);
    auto u = expand_tree(dist, Orientation::up, 6, rng2);
    assign_durations(u, dist, {}, rng2);
    deep.push_back(u.node(0).duration);
  }
  CHECK(stats::ks_distance(sampled, deep) < 0.02);
}

TEST_CASE("rescaling") {
  auto p = simulate(config(FamilySpec::fixed(2), 3, 4));
  CHECK(rescale_path(p, 0) == p);
  const auto q = rescale_path(p, 1);
  CHECK(q.resolution_level == p.resolution_level - 1);
  for (std::size_t i = 0; i < p.size(); ++i) {
    CHECK(q.times[i] == p.times[i] / 4.0);
    CHECK(q.values[i] == p.values[i] / 2.0);
  }
  p.mu.reset();
  CHECK_THROWS_AS(rescale_path(p, 1), Error);
}

TEST_CASE("a rescaled first subcrossing has the law of a root crossing") {
  std::vector<double> root, sub;
  for (std::uint64_t seed = 0; seed < 10000; ++seed) {
    root.push_back(simulate(config(FamilySpec::geometric(0.5), 5, seed)).span());
    const auto q = rescale_path(simulate(config(FamilySpec::geometric(0.5), 6, seed + 50000)), -1);
    const auto passages = extract_passage_times(q, 0);
    sub.push_back(passages.at(1).time - passages.at(0).time);
  }
  CHECK(stats::ks_distance(root, sub) < 0.02);
}

TEST_CASE("config validation") {
  CHECK_THROWS_AS(validate_config(config(FamilySpec::geometric(0.5), 0, 1)), Error);
  auto c = config(FamilySpec::geometric(0.5), 3, 1);
  c.root_mode = RootMode::tile;
  c.target_horizon = 0.0;
  CHECK_THROWS_AS(validate_config(c), Error);
  auto big = config(FamilySpec::geometric(0.5), 40, 1);
  try {
    (void)simulate(big);
    FAIL("expected budget error");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::node_budget_exceeded);
  }
}
