#include <doctest.h>

#include <algorithm>
#include <sstream>

#include "generators.hpp"

#include "cebp/analysis.hpp"
#include "cebp/error.hpp"
#include "cebp/path.hpp"
#include "cebp/simulator.hpp"

using namespace cebp;

namespace {

Errc ingest_error(const std::string& text) {
  std::istringstream in(text);
  try {
    (void)ingest_csv(in);
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an error");
  return Errc::invalid_argument;
}

}  // namespace

TEST_CASE("interpolation and resampling") {
  SamplePath p;
  p.times = {0.0, 1.0, 3.0};
  p.values = {0.0, 2.0, 1.0};
  CHECK(p.value_at(1.0) == 2.0);
  CHECK(p.value_at(0.5) == 1.0);
  CHECK(p.value_at(2.0) == 1.5);
  CHECK(p.value_at(-1.0) == 0.0);
  const auto r = resample_uniform(p, 2);
  CHECK(r.front() == std::pair{0.0, 0.0});
  CHECK(r.back() == std::pair{3.0, 1.0});
  const auto r4 = resample_uniform(p, 4);
  CHECK(r4[1].first == 1.0);
  CHECK(r4[1].second == 2.0);
  CHECK_THROWS_AS(resample_uniform(p, 1), Error);
}

TEST_CASE("normalised time") {
  SamplePath p;
  p.times = {2.0, 3.0, 6.0};
  p.values = {0.0, 1.0, 0.0};
  const auto q = normalize_time(p);
  CHECK(q.times == std::vector{0.0, 0.25, 1.0});
  CHECK(q.values == p.values);
}

TEST_CASE("CSV export and ingestion round trip") {
  SimulationConfig c;
  c.offspring = FamilySpec::geometric(0.5);
  c.depth = 6;
  c.seed = 21;
  c.durations.mode = DurationMode::sampled;
  c.durations.w_generations = 6;
  const auto p = simulate(c);
  std::istringstream in(path_csv(p));
  const auto q = ingest_csv(in);
  CHECK(q.times == p.times);
  CHECK(q.values == p.values);
  CHECK(q.resolution_level == p.resolution_level);
  CHECK(q.origin == PathOrigin::ingested);
  const auto a = estimate_hurst(extract_crossing_forest(p, -6, 0));
  const auto b = estimate_hurst(extract_crossing_forest(q, -6, 0));
  CHECK(a.hurst_hat == b.hurst_hat);
  CHECK(a.stderr_hurst == b.stderr_hurst);
}

TEST_CASE("two-row file") {
  std::istringstream in("0,0\n1,0.5\n");
  const auto p = ingest_csv(in);
  CHECK(p.size() == 2);
  CHECK(p.value_at(0.5) == 0.25);
}

TEST_CASE("ingestion errors carry line numbers") {
  CHECK(ingest_error("time,value\n0,0\n2,1\n1,0\n") == Errc::non_monotone_time);
  CHECK(ingest_error("time,value\n0,0\nabc,1\n") == Errc::parse_error);
  CHECK(ingest_error("0,0\n") == Errc::parse_error);
  std::istringstream in("time,value\n0,0\n2,1\n1,0\n");
  try {
    (void)ingest_csv(in);
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("line 4") != std::string::npos);
  }
}

TEST_CASE("anchoring and columns") {
  std::istringstream in("# comment\nidx,t,x\n0,0.0,5.0\n1,1.0,5.5\n2,2.0,5.25\n");
  CsvColumns cols;
  cols.time = 1;
  cols.value = 2;
  const auto p = ingest_csv(in, cols);
  CHECK(p.values == std::vector{0.0, 0.5, 0.25});
  CHECK(p.resolution_level == -2);
}

TEST_CASE("restricted path agrees with the original inside the window") {
  for (int c = 0; c < 50; ++c) {
    auto rng = testgen::case_rng(0x7e57, static_cast<std::uint64_t>(c));
    SamplePath p;
    double t = 0.0, x = 0.0;
    const int n = testgen::uniform_int(rng, 2, 40);
    for (int i = 0; i < n; ++i) {
      p.times.push_back(t);
      p.values.push_back(x);
      t += testgen::uniform(rng, 0.01, 1.0);
      x += testgen::uniform(rng, -1.0, 1.0);
    }
    const double a = testgen::uniform(rng, p.start_time(), p.end_time());
    const double b = testgen::uniform(rng, a, p.end_time());
    if (!(a < b)) continue;
    const auto w = restrict_path(p, a, b);
    CHECK(w.start_time() == a);
    CHECK(w.end_time() == b);
    CHECK(std::is_sorted(w.times.begin(), w.times.end()));
    for (int k = 0; k <= 20; ++k) {
      const double s = a + (b - a) * k / 20.0;
      CHECK(w.value_at(s) == doctest::Approx(p.value_at(s)).epsilon(1e-12));
    }
  }
  SamplePath q;
  q.times = {0.0, 1.0};
  q.values = {0.0, 1.0};
  CHECK_THROWS_AS((void)restrict_path(q, 0.5, 2.0), Error);
}
