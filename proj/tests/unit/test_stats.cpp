#include <doctest.h>

#include <cmath>

#include "cebp/error.hpp"
#include "cebp/stats.hpp"
#include "cebp/tail_fit.hpp"
#include "generators.hpp"

using namespace cebp;

TEST_CASE("least squares on an exact line") {
  const std::vector<double> x{1, 2, 3, 4};
  const std::vector<double> y{3, 5, 7, 9};
  const auto f = stats::least_squares(x, y);
  CHECK(f.slope == doctest::Approx(2.0));
  CHECK(f.intercept == doctest::Approx(1.0));
  CHECK(f.r_squared == doctest::Approx(1.0));
}

TEST_CASE("moments and quantiles") {
  const std::vector<double> x{4, 1, 3, 2};
  CHECK(stats::mean(x) == 2.5);
  CHECK(stats::variance(x) == doctest::Approx(5.0 / 3.0));
  CHECK(stats::quantile(x, 0.0) == 1.0);
  CHECK(stats::quantile(x, 0.5) == 2.0);
  CHECK(stats::quantile(x, 1.0) == 4.0);
}

TEST_CASE("two-sample KS") {
  const std::vector<double> a{1, 2, 3, 4};
  CHECK(stats::ks_distance(a, a) == 0.0);
  const std::vector<double> b{5, 6, 7};
  CHECK(stats::ks_distance(a, b) == 1.0);
  const std::vector<double> c{1, 1, 2, 2};
  const std::vector<double> d{1, 2, 2, 2};
  CHECK(stats::ks_distance(c, d) == doctest::Approx(0.25));
}

TEST_CASE("property: tail fitter recovers planted exponents") {
  for (std::uint64_t i = 0; i < 200; ++i) {
    auto rng = testgen::case_rng(51, i);
    const double a = testgen::uniform(rng, 0.2, 3.0);
    const double c = testgen::uniform(rng, 0.1, 2.0);
    const bool lower = coin(rng);
    std::vector<double> x, p;
    for (int k = 0; k < 12; ++k) {
      const double u = std::exp(testgen::uniform(rng, -2.0, 1.0));
      x.push_back(u);
      // lower tail exp(-c x^-a), upper tail exp(-c x^a)
      p.push_back(std::exp(-c * std::pow(u, lower ? -a : a)));
    }
    const double target = lower ? -a : a;
    const auto f = fit_tail(x, p, target);
    CAPTURE(i);
    CHECK(std::abs(f.slope - target) < 0.02);
    CHECK(f.intercept == doctest::Approx(std::log(c)).epsilon(1e-6));
    CHECK(f.relative_error() < 0.02);
  }
}

TEST_CASE("tail fitter keeps only informative points") {
  const std::vector<double> x{1, 2, 3, 4, 5, 6};
  const std::vector<double> p{0.0, 1.0, 0.5, 0.25, 0.125, 1.0};
  try {
    (void)fit_tail(x, p, 1.0);
    FAIL("expected error");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::insufficient_tail_points);
  }
  const auto f = fit_tail(x, p, 1.0, 3);
  CHECK(f.abscissa.size() == 3);
}

TEST_CASE("tail grids are increasing quantiles") {
  std::vector<double> s;
  for (int i = 1; i <= 10000; ++i) s.push_back(i);
  const auto lo = lower_tail_grid(s, 12, 1e-3, 0.1);
  const auto hi = upper_tail_grid(s, 12, 1e-3, 0.1);
  CHECK(lo.front() == doctest::Approx(10.0));
  CHECK(lo.back() == doctest::Approx(1000.0));
  CHECK(hi.front() < hi.back());
  for (std::size_t i = 1; i < lo.size(); ++i) CHECK(lo[i] > lo[i - 1]);
}
