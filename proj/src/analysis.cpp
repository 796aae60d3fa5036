#include "cebp/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "cebp/error.hpp"
#include "cebp/kernels.hpp"
#include "cebp/stats.hpp"

namespace cebp {

// ---------------------------------------------------------------------------

HurstEstimate estimate_hurst(const CrossingForest& forest) {
  if (forest.levels.size() < 2) throw Error(Errc::insufficient_crossings, "need at least two levels");
  std::vector<double> counts;
  HurstEstimate est;
  for (std::size_t li = 0; li < forest.levels.size(); ++li) {
    const auto& lv = forest.levels[li];
    LevelCount lc{lv.level, 0, 0.0, 0.0};
    double csum = 0.0, dsum = 0.0;
    for (const auto& r : lv.records) {
      dsum += r.duration;
      if (li > 0) {
        counts.push_back(static_cast<double>(r.subcrossing_count));
        csum += r.subcrossing_count;
      }
    }
    if (li > 0) lc.parents = lv.records.size();
    if (lc.parents > 0) lc.mean_count = csum / static_cast<double>(lc.parents);
    if (!lv.records.empty()) lc.mean_duration = dsum / static_cast<double>(lv.records.size());
    est.per_level.push_back(lc);
  }
  if (counts.size() < 30) {
    throw Error(Errc::insufficient_crossings, std::to_string(counts.size()) + " complete parent crossings (need 30)");
  }
  est.parents = counts.size();
  est.mu_hat = stats::mean(counts);
  if (!(est.mu_hat > 2.0)) throw Error(Errc::insufficient_crossings, "estimated mean subcrossing count <= 2");
  const double lmu = std::log(est.mu_hat);
  est.hurst_hat = std::log(2.0) / lmu;
  est.stderr_mu = std::sqrt(stats::variance(counts) / static_cast<double>(counts.size()));
  est.stderr_hurst = std::log(2.0) / (est.mu_hat * lmu * lmu) * est.stderr_mu;

  std::vector<double> lv, ld;
  for (const auto& lc : est.per_level) {
    if (lc.mean_duration > 0.0) {
      lv.push_back(lc.level);
      ld.push_back(std::log(lc.mean_duration));
    }
  }
  if (lv.size() >= 2) {
    const auto fit = stats::least_squares(lv, ld);
    est.duration_slope = fit.slope;
    if (fit.slope > 0.0) est.hurst_hat_duration = std::log(2.0) / fit.slope;
  }
  return est;
}

std::map<int, double> subcrossing_pmf(const CrossingForest& forest) {
  std::map<int, double> pmf;
  double total = 0.0;
  for (std::size_t li = 1; li < forest.levels.size(); ++li) {
    for (const auto& r : forest.levels[li].records) {
      pmf[static_cast<int>(r.subcrossing_count)] += 1.0;
      total += 1.0;
    }
  }
  for (auto& [z, p] : pmf) p /= total;
  return pmf;
}

double tv_distance_to_geometric_pairs(const std::map<int, double>& pmf) {
  double diff = 0.0;
  double covered = 0.0;
  for (const auto& [z, p] : pmf) {
    const double q = (z >= 2 && z % 2 == 0) ? std::ldexp(1.0, -z / 2) : 0.0;
    diff += std::abs(p - q);
    covered += q;
  }
  return 0.5 * (diff + std::max(0.0, 1.0 - covered));
}

// ---------------------------------------------------------------------------

namespace {

double mean_spacing(const SamplePath& path) { return path.span() / static_cast<double>(path.size() - 1); }

// sup over u in [lo, hi] of |X(u) - X(t)|, with xt = X(t).
double window_oscillation(const SamplePath& path, double lo, double hi, double xt) {
  double mn = std::min(path.value_at(lo), path.value_at(hi));
  double mx = std::max(path.value_at(lo), path.value_at(hi));
  const auto b = std::upper_bound(path.times.begin(), path.times.end(), lo);
  const auto e = std::lower_bound(b, path.times.end(), hi);
  if (e > b) {
    const auto i0 = static_cast<std::size_t>(b - path.times.begin());
    const auto i1 = static_cast<std::size_t>(e - path.times.begin());
    const auto mm = kernels::minmax(std::span<const double>(path.values).subspan(i0, i1 - i0));
    mn = std::min(mn, mm.min);
    mx = std::max(mx, mm.max);
  }
  return std::max(mx - xt, xt - mn);
}

}  // namespace

double local_holder(const SamplePath& path, double t, EpsRange eps) {
  if (path.size() < 2) throw Error(Errc::eps_range_infeasible, "path too short");
  if (eps.finest <= eps.coarsest) throw Error(Errc::eps_range_infeasible, "need at least two epsilon levels");
  if (!(t > path.start_time() && t < path.end_time())) throw Error(Errc::eps_range_infeasible, "t not interior");
  if (std::ldexp(1.0, -eps.finest) < mean_spacing(path)) {
    throw Error(Errc::eps_range_infeasible, "finest epsilon 2^-" + std::to_string(eps.finest) +
                                                " is below the mean knot spacing");
  }
  const double xt = path.value_at(t);
  std::vector<double> le, lo;
  for (int j = eps.coarsest; j <= eps.finest; ++j) {
    const double e = std::ldexp(1.0, -j);
    const double osc = window_oscillation(path, std::max(path.start_time(), t - e), std::min(path.end_time(), t + e), xt);
    if (!(osc > 0.0)) throw Error(Errc::eps_range_infeasible, "zero oscillation at epsilon 2^-" + std::to_string(j));
    le.push_back(std::log(e));
    lo.push_back(std::log(osc));
  }
  return stats::least_squares(le, lo).slope;
}

HolderEstimate holder_histogram(const SamplePath& path, std::size_t grid_size, EpsRange eps) {
  if (grid_size < 100) throw Error(Errc::invalid_argument, "grid_size must be >= 100");
  HolderEstimate h;
  h.eps = eps;
  const std::size_t bins = 40;
  h.histogram.assign(bins, 0);
  const double t0 = path.start_time();
  const double step = path.span() / static_cast<double>(grid_size);
  for (std::size_t i = 0; i < grid_size; ++i) {
    const double t = t0 + (static_cast<double>(i) + 0.5) * step;
    const double e = local_holder(path, t, eps);
    h.grid_times.push_back(t);
    h.exponents.push_back(e);
    const double b = std::floor(e / h.bin_width);
    const auto bi = static_cast<std::size_t>(std::clamp(b, 0.0, static_cast<double>(bins - 1)));
    ++h.histogram[bi];
  }
  const double lg = std::log(static_cast<double>(grid_size));
  for (std::size_t c : h.histogram) {
    h.coarse_spectrum.push_back(c > 0 ? std::log(static_cast<double>(c)) / lg
                                      : -std::numeric_limits<double>::infinity());
  }
  h.mean = stats::mean(h.exponents);
  h.stddev = std::sqrt(stats::variance(h.exponents));
  return h;
}

// ---------------------------------------------------------------------------

double modulus_gauge(double delta, double hurst) {
  return std::pow(delta, hurst) * std::pow(std::abs(std::log(delta)), 1.0 - hurst);
}

namespace {

void check_unit_span(const SamplePath& path) {
  if (path.size() < 2 || std::abs(path.start_time()) > 1e-12 || std::abs(path.end_time() - 1.0) > 1e-12) {
    throw Error(Errc::invalid_argument, "modulus needs a path on [0, 1]; see normalize_time");
  }
}

void finish_report(ModulusReport& r) {
  r.ratio_min = *std::min_element(r.ratios.begin(), r.ratios.end());
  r.ratio_max = *std::max_element(r.ratios.begin(), r.ratios.end());
  r.stable = r.ratio_min > 0.0 && r.ratio_max / r.ratio_min <= r.stability_bound;
}

}  // namespace

ModulusReport modulus_ratio(const SamplePath& path, int l_min, int l_max, double hurst, double stability_bound) {
  check_unit_span(path);
  if (l_min < 1 || l_max < l_min || l_max > 26) throw Error(Errc::l_range_infeasible, "bad dyadic level range");
  if (std::ldexp(1.0, -l_max) < mean_spacing(path)) {
    throw Error(Errc::l_range_infeasible, "2^-" + std::to_string(l_max) + " is finer than the path resolution");
  }
  const std::size_t blocks = std::size_t{1} << l_max;
  // Grid values X(m 2^-L) and per-block extrema at the finest level L.
  std::vector<double> grid(blocks + 1);
  std::vector<double> bmin(blocks), bmax(blocks);
  const auto& T = path.times;
  const auto& V = path.values;
  std::size_t j = 0;  // first knot with time > current block start
  for (std::size_t m = 0; m <= blocks; ++m) grid[m] = path.value_at(std::ldexp(static_cast<double>(m), -l_max));
  for (std::size_t m = 0; m < blocks; ++m) {
    const double a = std::ldexp(static_cast<double>(m), -l_max);
    const double b = std::ldexp(static_cast<double>(m + 1), -l_max);
    while (j < T.size() && T[j] <= a) ++j;
    std::size_t k = j;
    while (k < T.size() && T[k] < b) ++k;
    double mn = std::min(grid[m], grid[m + 1]);
    double mx = std::max(grid[m], grid[m + 1]);
    if (k > j) {
      const auto mm = kernels::minmax(std::span<const double>(V).subspan(j, k - j));
      mn = std::min(mn, mm.min);
      mx = std::max(mx, mm.max);
    }
    bmin[m] = mn;
    bmax[m] = mx;
  }
  ModulusReport r;
  r.hurst = hurst;
  r.stability_bound = stability_bound;
  std::size_t count = blocks;
  for (int l = l_max; l >= l_min; --l) {
    if (l < l_max) {
      count /= 2;
      for (std::size_t m = 0; m < count; ++m) {
        bmin[m] = std::min(bmin[2 * m], bmin[2 * m + 1]);
        bmax[m] = std::max(bmax[2 * m], bmax[2 * m + 1]);
      }
    }
    const std::size_t stride = blocks / count;
    double amax = 0.0, phimax = 0.0;
    for (std::size_t m = 0; m < count; ++m) {
      const double x0 = grid[m * stride];
      amax = std::max(amax, std::abs(grid[(m + 1) * stride] - x0));
      phimax = std::max(phimax, std::max(bmax[m] - x0, x0 - bmin[m]));
    }
    const double delta = std::ldexp(1.0, -l);
    r.levels.push_back(l);
    r.deltas.push_back(delta);
    r.lattice_increment_max.push_back(amax);
    r.block_sup_max.push_back(phimax);
    r.ratios.push_back(std::max(amax, phimax) / modulus_gauge(delta, hurst));
  }
  // Report in increasing l.
  std::reverse(r.levels.begin(), r.levels.end());
  std::reverse(r.deltas.begin(), r.deltas.end());
  std::reverse(r.lattice_increment_max.begin(), r.lattice_increment_max.end());
  std::reverse(r.block_sup_max.begin(), r.block_sup_max.end());
  std::reverse(r.ratios.begin(), r.ratios.end());
  finish_report(r);
  return r;
}

ModulusReport modulus_ratio_bruteforce(const SamplePath& path, int l_min, int l_max, double hurst,
                                       double stability_bound) {
  check_unit_span(path);
  if (path.size() - 1 > kBruteForceMaxSegments) {
    throw Error(Errc::invalid_argument, "brute-force modulus is limited to " + std::to_string(kBruteForceMaxSegments) +
                                            " segments");
  }
  if (l_min < 1 || l_max < l_min || l_max > 16) throw Error(Errc::l_range_infeasible, "bad dyadic level range");
  std::vector<std::pair<double, double>> pts;
  for (std::size_t i = 0; i < path.size(); ++i) pts.emplace_back(path.times[i], path.values[i]);
  const std::size_t blocks = std::size_t{1} << l_max;
  for (std::size_t m = 0; m <= blocks; ++m) {
    const double t = std::ldexp(static_cast<double>(m), -l_max);
    pts.emplace_back(t, path.value_at(t));
  }
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end(), [](const auto& a, const auto& b) { return a.first == b.first; }),
            pts.end());

  const double reach = std::ldexp(1.0, -l_min);
  std::vector<double> best(static_cast<std::size_t>(l_max) + 1, 0.0);
  for (std::size_t i = 0; i < pts.size(); ++i) {
    for (std::size_t k = i + 1; k < pts.size(); ++k) {
      const double u = pts[k].first - pts[i].first;
      if (u > reach) break;
      const double ratio = std::abs(pts[k].second - pts[i].second) / modulus_gauge(u, hurst);
      const int l = std::min(l_max, static_cast<int>(std::floor(-std::log2(u))));
      auto& b = best[static_cast<std::size_t>(l)];
      b = std::max(b, ratio);
    }
  }
  ModulusReport r;
  r.hurst = hurst;
  r.stability_bound = stability_bound;
  double running = 0.0;
  std::vector<double> sup(best.size(), 0.0);
  for (int l = l_max; l >= l_min; --l) {
    running = std::max(running, best[static_cast<std::size_t>(l)]);
    sup[static_cast<std::size_t>(l)] = running;
  }
  for (int l = l_min; l <= l_max; ++l) {
    r.levels.push_back(l);
    r.deltas.push_back(std::ldexp(1.0, -l));
    r.ratios.push_back(sup[static_cast<std::size_t>(l)]);
  }
  finish_report(r);
  return r;
}

// ---------------------------------------------------------------------------

IncrementSample sample_increment(const SamplePath& path, double t, Rng& rng) {
  if (!(t > 0.0)) throw Error(Errc::invalid_argument, "increment lag must be positive");
  const double lo = path.start_time();
  const double hi = std::min(lo + kQueryFraction * path.span(), path.end_time() - t);
  if (hi < lo) throw Error(Errc::invalid_argument, "lag exceeds the path span");
  const double s = lo + uniform01(rng) * (hi - lo);
  const double xs = path.value_at(s);
  const double xe = path.value_at(s + t);
  IncrementSample out;
  out.plain = std::abs(xe - xs);
  out.sup = window_oscillation(path, s, s + t, xs);
  return out;
}

IncrementTailReport increment_tail_from_samples(std::span<const IncrementSample> samples, double hurst, double t,
                                                std::vector<double> lambda_grid) {
  if (samples.empty()) throw Error(Errc::invalid_argument, "no increment samples");
  if (!(hurst > 0.0 && hurst < 1.0)) throw Error(Errc::invalid_argument, "hurst must be in (0, 1)");
  const std::size_t n = samples.size();
  std::vector<double> plain(n), sup(n);
  for (std::size_t i = 0; i < n; ++i) {
    plain[i] = samples[i].plain;
    sup[i] = samples[i].sup;
  }
  if (lambda_grid.empty()) {
    const double p_lo = 10.0 / static_cast<double>(n);
    if (!(p_lo < 0.1)) throw Error(Errc::insufficient_tail_points, "too few samples for a default grid");
    lambda_grid = upper_tail_grid(plain, 12, p_lo, 0.1);
    std::erase_if(lambda_grid, [](double x) { return !(x > 0.0); });
  }
  for (std::size_t i = 1; i < lambda_grid.size(); ++i) {
    if (!(lambda_grid[i] > lambda_grid[i - 1])) throw Error(Errc::invalid_argument, "lambda grid must increase");
  }
  IncrementTailReport r;
  r.t = t;
  r.hurst = hurst;
  r.samples = n;
  r.lambda_grid = lambda_grid;
  std::vector<double> u;
  for (double lam : lambda_grid) {
    const double pp = static_cast<double>(kernels::count_greater(plain, lam)) / static_cast<double>(n);
    const double ps = static_cast<double>(kernels::count_greater(sup, lam)) / static_cast<double>(n);
    r.p_plain.push_back(pp);
    r.p_sup.push_back(ps);
    if (pp > ps) ++r.sandwich_violations;
    u.push_back(std::pow(lam, 1.0 / hurst) / t);
  }
  const double target = hurst / (1.0 - hurst);
  r.fit = fit_tail(u, r.p_plain, target);
  try {
    r.sup_fit = fit_tail(u, r.p_sup, target);
  } catch (const Error&) {
    r.sup_fit.reset();
  }
  return r;
}

IncrementTailReport increment_tail(std::span<const SamplePath> paths, double t, std::vector<double> lambda_grid,
                                   std::uint64_t seed, std::size_t min_ensemble) {
  if (paths.size() < min_ensemble) {
    throw Error(Errc::invalid_argument, "ensemble of " + std::to_string(paths.size()) + " paths, need " +
                                            std::to_string(min_ensemble));
  }
  if (!paths.front().hurst) throw Error(Errc::invalid_argument, "paths carry no Hurst index");
  std::vector<IncrementSample> samples;
  samples.reserve(paths.size());
  for (std::size_t i = 0; i < paths.size(); ++i) {
    Rng rng = make_stream(seed, StreamTag::query_time, i);
    samples.push_back(sample_increment(paths[i], t, rng));
  }
  return increment_tail_from_samples(samples, *paths.front().hurst, t, std::move(lambda_grid));
}

std::optional<RemainingTimeRecord> remaining_time_record(std::span<const Passage> level_n,
                                                         std::span<const Passage> level_n1, int n, double s) {
  auto by_time = [](const Passage& p, double t) { return p.time < t; };
  const auto it = std::lower_bound(level_n.begin(), level_n.end(), s, by_time);
  if (it == level_n.end()) return std::nullopt;
  RemainingTimeRecord r;
  r.s = s;
  r.n = n;
  r.t_n0 = it->time;
  r.gap = it->time - s;
  const auto k0 = it - level_n.begin();
  const auto b = std::lower_bound(level_n1.begin(), level_n1.end(), r.t_n0, by_time);
  if (b == level_n1.begin()) return r;
  const auto a_n = std::lower_bound(level_n.begin(), level_n.end(), (b - 1)->time, by_time) - level_n.begin();
  r.y = k0 - a_n;
  if (b != level_n1.end()) {
    const auto b_n = std::lower_bound(level_n.begin(), level_n.end(), b->time, by_time) - level_n.begin();
    r.remaining = b_n - k0;
  }
  return r;
}

std::optional<RemainingTimeRecord> sample_remaining_time(const SamplePath& path, int n, Rng& rng) {
  const double s = path.start_time() + uniform01(rng) * kQueryFraction * path.span();
  const auto pn = extract_passage_times(path, n);
  const auto pn1 = extract_passage_times(path, n + 1);
  return remaining_time_record(pn, pn1, n, s);
}

RemainingTimeReport remaining_time_tail(std::span<const RemainingTimeRecord> records, double mu,
                                        std::vector<double> x_grid) {
  if (records.empty()) throw Error(Errc::invalid_argument, "no remaining-time records");
  if (!(mu > 2.0)) throw Error(Errc::invalid_argument, "mu must exceed 2");
  const int level = records.front().n;
  const std::size_t n = records.size();
  std::vector<double> gaps(n);
  RemainingTimeReport r;
  r.n = level;
  r.mu = mu;
  r.hurst = std::log(2.0) / std::log(mu);
  r.records = n;
  double ysum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (records[i].n != level) throw Error(Errc::invalid_argument, "records mix levels");
    gaps[i] = records[i].gap;
    ++r.y_histogram[records[i].y];
    ysum += static_cast<double>(records[i].y);
  }
  r.mean_y = ysum / static_cast<double>(n);
  if (x_grid.empty()) {
    const double p_lo = 10.0 / static_cast<double>(n);
    if (!(p_lo < 0.1)) throw Error(Errc::insufficient_tail_points, "too few records for a default grid");
    x_grid = lower_tail_grid(gaps, 12, p_lo, 0.1);
    std::erase_if(x_grid, [](double x) { return !(x > 0.0); });
  }
  for (std::size_t i = 1; i < x_grid.size(); ++i) {
    if (!(x_grid[i] > x_grid[i - 1])) throw Error(Errc::invalid_argument, "x grid must increase");
  }
  r.x_grid = x_grid;
  std::vector<double> u;
  const double scale = std::pow(mu, -level);
  for (double x : x_grid) {
    r.p_hat.push_back(static_cast<double>(n - kernels::count_greater(gaps, x)) / static_cast<double>(n));
    u.push_back(scale * x);
  }
  r.fit = fit_tail(u, r.p_hat, -r.hurst / (1.0 - r.hurst));
  return r;
}

// ---------------------------------------------------------------------------

ScaleInvarianceReport duration_scale_invariance(std::span<const CrossingForest> forests, double mu,
                                                std::size_t min_crossings) {
  std::map<int, std::vector<double>> scaled;
  for (const auto& f : forests) {
    for (const auto& lv : f.levels) {
      const double s = std::pow(mu, -lv.level);
      auto& bucket = scaled[lv.level];
      for (const auto& r : lv.records) bucket.push_back(s * r.duration);
    }
  }
  std::vector<int> usable;
  for (const auto& [level, v] : scaled) {
    if (v.size() >= min_crossings) usable.push_back(level);
  }
  ScaleInvarianceReport rep;
  rep.mu = mu;
  for (std::size_t i = 0; i + 1 < usable.size(); ++i) {
    if (usable[i + 1] != usable[i] + 1) continue;
    const auto& a = scaled[usable[i]];
    const auto& b = scaled[usable[i + 1]];
    LevelPairKs p{usable[i], usable[i + 1], a.size(), b.size(), stats::ks_distance(a, b)};
    rep.max_ks = std::max(rep.max_ks, p.ks);
    rep.pairs.push_back(p);
  }
  if (rep.pairs.empty()) {
    throw Error(Errc::insufficient_crossings, "need two adjacent levels with at least " + std::to_string(min_crossings) +
                                                  " crossings each");
  }
  return rep;
}

}  // namespace cebp
