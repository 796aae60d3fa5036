#include <doctest.h>

#include <cmath>

#include "cebp/error.hpp"
#include "cebp/forest.hpp"
#include "cebp/simulator.hpp"
#include "generators.hpp"

using namespace cebp;

namespace {

SamplePath ramp(double end, std::size_t knots) {
  SamplePath p;
  for (std::size_t i = 0; i < knots; ++i) {
    const double t = end * static_cast<double>(i) / static_cast<double>(knots - 1);
    p.times.push_back(t);
    p.values.push_back(t);
  }
  p.resolution_level = static_cast<int>(std::floor(std::log2(end / static_cast<double>(knots - 1))));
  p.origin = PathOrigin::ingested;
  return p;
}

SamplePath random_walk(std::size_t steps, std::uint64_t seed) {
  SamplePath p;
  auto rng = make_stream(seed, StreamTag::random_walk);
  double x = 0.0;
  for (std::size_t i = 0; i <= steps; ++i) {
    p.times.push_back(static_cast<double>(i));
    p.values.push_back(x);
    x += coin(rng) ? 1.0 : -1.0;
  }
  p.resolution_level = 0;
  p.origin = PathOrigin::ingested;
  return p;
}

}  // namespace

TEST_CASE("passage times of a ramp") {
  const auto p = ramp(4.0, 5);
  const auto l0 = extract_passage_times(p, 0);
  REQUIRE(l0.size() == 5);
  for (std::size_t k = 0; k < 5; ++k) {
    CHECK(l0[k].time == static_cast<double>(k));
    CHECK(l0[k].value == static_cast<double>(k));
  }
  const auto l1 = extract_passage_times(p, 1);
  REQUIRE(l1.size() == 3);
  CHECK(l1[1].time == 2.0);
  CHECK(l1[2].time == 4.0);
}

TEST_CASE("level finer than the path") {
  auto p = ramp(4.0, 5);
  try {
    (void)extract_passage_times(p, -1);
    FAIL("expected error");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::level_too_fine);
  }
}

TEST_CASE("simulated knots are the finest passage times") {
  SimulationConfig c;
  c.offspring = FamilySpec::geometric(0.5);
  c.depth = 5;
  c.seed = 3;
  const auto p = simulate(c);
  const auto pt = extract_passage_times(p, p.resolution_level);
  REQUIRE(pt.size() == p.size());
  for (std::size_t i = 0; i < p.size(); ++i) {
    CHECK(pt[i].time == p.times[i]);
    CHECK(pt[i].value == p.values[i]);
  }
}

TEST_CASE("forest of a ramp") {
  const auto f = extract_crossing_forest(ramp(8.0, 9), 0, 2);
  CHECK(validate_forest(f) == std::nullopt);
  CHECK(f.levels.size() == 3);
  for (const auto& r : f.at(2).records) {
    CHECK(r.subcrossing_count == 2);
    CHECK(r.orientation == Orientation::up);
  }
  for (const auto& lv : f.levels) {
    for (const auto& r : lv.records) CHECK(r.orientation == Orientation::up);
  }
}

TEST_CASE("no complete crossing at the top level") {
  try {
    (void)extract_crossing_forest(ramp(1.0, 2), 0, 5);
    FAIL("expected error");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::no_complete_crossing);
  }
  try {
    (void)extract_crossing_forest(ramp(0.5, 2), -1, 0);
    FAIL("expected error");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::no_complete_crossing);
  }
}

TEST_CASE("round trip against generating trees") {
  for (const auto& spec : {FamilySpec::fixed(2), FamilySpec::geometric(0.5), FamilySpec::poisson(1.0)}) {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
      SimulationConfig c;
      c.offspring = spec;
      c.depth = 6;
      c.seed = seed;
      c.durations.mode = seed % 2 ? DurationMode::sampled : DurationMode::mean;
      c.durations.w_generations = 4;
      const auto r = simulate_detailed(c);
      const auto f = extract_crossing_forest(r.path, -6, 0);
      CAPTURE(seed);
      CHECK(validate_forest(f) == std::nullopt);
      const auto cmp = compare_forest_to_tree(f, r.trees.front());
      CHECK(cmp.counts_match);
      CHECK(cmp.orientations_match);
      CHECK(cmp.max_time_error <= 1e-9);
      CHECK(cmp.first_mismatch == std::nullopt);
    }
  }
}

TEST_CASE("round trip detects a corrupted path") {
  SimulationConfig c;
  c.offspring = FamilySpec::geometric(0.5);
  c.depth = 4;
  c.seed = 12;
  auto r = simulate_detailed(c);
  auto& v = r.path.values;
  // reflect one interior excursion: swaps the orientation of some subcrossing
  std::size_t i = 1;
  while (i + 1 < v.size() && !(v[i - 1] == v[i + 1])) ++i;
  REQUIRE(i + 1 < v.size());
  v[i] = 2 * v[i - 1] - v[i];
  const auto f = extract_crossing_forest(r.path, -4, 0);
  CHECK_FALSE(compare_forest_to_tree(f, r.trees.front()).orientations_match);
}

TEST_CASE("property: nesting invariants on random walks") {
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const auto p = random_walk(20000, seed);
    const auto [lo, hi] = feasible_level_range(p);
    CHECK(lo == 0);
    REQUIRE(hi >= 3);
    const auto f = extract_crossing_forest(p, lo, hi);
    CAPTURE(seed);
    CHECK(validate_forest(f) == std::nullopt);
    for (std::size_t li = 1; li < f.levels.size(); ++li) {
      for (const auto& r : f.levels[li].records) {
        CHECK(r.subcrossing_count >= 2);
        CHECK(r.subcrossing_count % 2 == 0);
        const double rise = p.value_at(r.end_time) - p.value_at(r.start_time);
        CHECK(rise == sign(r.orientation) * std::ldexp(1.0, f.levels[li].level));
      }
    }
  }
}

TEST_CASE("interpolated hits between coarse samples") {
  SamplePath p;
  p.times = {0.0, 1.0, 3.0};
  p.values = {0.0, 0.25, -1.75};
  p.resolution_level = -2;
  const auto pt = extract_passage_times(p, -1);
  REQUIRE(pt.size() == 4);
  CHECK(pt[1].value == -0.5);
  CHECK(pt[1].time == doctest::Approx(1.75));
  CHECK(pt[3].value == -1.5);
  CHECK(pt[3].time == doctest::Approx(2.75));
}
