#include "cebp/verify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "cebp/error.hpp"
#include "cebp/parallel.hpp"
#include "cebp/stats.hpp"

namespace cebp::verify {

bool Verdict::pass() const {
  return !criteria.empty() && std::all_of(criteria.begin(), criteria.end(), [](const Criterion& c) { return c.pass; });
}

Json to_json(const Verdict& v, std::uint64_t seed) {
  Json j = report::provenance(v.config, seed);
  j["suite"] = v.suite;
  j["pass"] = v.pass();
  Json cs = Json::array();
  for (const auto& c : v.criteria) {
    cs.push_back({{"id", c.id}, {"description", c.description}, {"pass", c.pass}, {"numbers", c.numbers}});
  }
  j["criteria"] = cs;
  return j;
}

const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names{"w-tail",     "increments", "remaining-time", "modulus",
                                              "holder",     "scale-invariance", "assumptions", "round-trip",
                                              "brownian"};
  return names;
}

SimulationConfig member_config(const SimulationConfig& base, std::uint64_t seed, std::size_t index) {
  SimulationConfig c = base;
  c.seed = derive_seed(seed, StreamTag::ensemble, index);
  return c;
}

int depth_for_resolution(const OffspringDistribution& dist, int bits) {
  return std::max(1, static_cast<int>(std::ceil(bits * dist.hurst() - 1e-9)));
}

namespace {

std::string label(const FamilySpec& f) {
  std::string s(family_name(f.family));
  if (f.family != Family::custom) s += "(" + report::format_double(f.param) + ")";
  return s;
}

Json family_list(const std::vector<FamilySpec>& fs) {
  Json a = Json::array();
  for (const auto& f : fs) a.push_back(report::to_json(f));
  return a;
}

double relative_error(double value, double target) { return std::abs(value - target) / std::abs(target); }

// Tiled path cut to [0, 1], so knots keep their simulated spacing.
SamplePath unit_window(SimulationConfig config) {
  config.root_mode = RootMode::tile;
  config.target_horizon = 1.0;
  return restrict_path(simulate(config), 0.0, 1.0);
}

SimulationConfig base_config(const FamilySpec& family, int depth) {
  SimulationConfig c;
  c.offspring = family;
  c.depth = depth;
  return c;
}

}  // namespace

// ---------------------------------------------------------------------------

Verdict w_tail(const WTailOptions& o, std::uint64_t seed, unsigned workers) {
  Verdict v;
  v.suite = "w-tail";
  v.config = {{"families", family_list(o.families)},
              {"generations", o.generations},
              {"samples", o.samples},
              {"tolerance", o.tolerance},
              {"min_r_squared", o.min_r_squared}};
  for (std::size_t fi = 0; fi < o.families.size(); ++fi) {
    const auto dist = make_offspring(o.families[fi]);
    WSampleOptions wo;
    wo.workers = workers;
    const auto ens = sample_W(dist, o.generations, o.samples, derive_seed(seed, StreamTag::w_sample, fi), wo);
    const double n = static_cast<double>(o.samples);
    const auto grid = lower_tail_grid(ens.samples, 12, 10.0 / n, 0.1);
    const auto fit = w_left_tail_fit(ens, grid);
    Criterion c;
    c.id = "w-tail/" + label(o.families[fi]);
    c.description = "slope of log(-log P(W<x)) vs log x within tolerance of -H/(1-H), r^2 above minimum";
    c.pass = relative_error(fit.slope, fit.target_exponent) <= o.tolerance && fit.r_squared >= o.min_r_squared;
    c.numbers = report::to_json(fit);
    c.numbers["hurst"] = dist.hurst();
    c.numbers["mean_w"] = stats::mean(ens.samples);
    c.numbers["x_grid"] = grid;
    v.criteria.push_back(std::move(c));
  }
  return v;
}

// ---------------------------------------------------------------------------

Verdict increments(const IncrementOptions& o, std::uint64_t seed, unsigned workers) {
  Verdict v;
  v.suite = "increments";
  const auto dist = make_offspring(o.family);
  const double t = std::pow(dist.mu(), -o.lag_generations);
  v.config = {{"family", report::to_json(o.family)}, {"depth", o.depth},       {"ensemble", o.ensemble},
              {"lag", t},                            {"tolerance", o.tolerance}};
  const auto base = base_config(o.family, o.depth);
  std::vector<std::optional<IncrementSample>> slots(o.ensemble);
  parallel_for(o.ensemble, workers, [&](std::size_t i) {
    const auto path = simulate(member_config(base, seed, i));
    if (path.span() <= t) return;
    Rng rng = make_stream(seed, StreamTag::query_time, i);
    slots[i] = sample_increment(path, t, rng);
  });
  std::vector<IncrementSample> samples;
  for (const auto& s : slots) {
    if (s) samples.push_back(*s);
  }
  const auto rep = increment_tail_from_samples(samples, dist.hurst(), t, {});
  Criterion c;
  c.id = "increments/exponent";
  c.description = "slope of log(-log P(|X(s+t)-X(s)|>lambda)) vs log(lambda^(1/H)/t) within tolerance of H/(1-H)";
  c.pass = relative_error(rep.fit.slope, rep.fit.target_exponent) <= o.tolerance;
  c.numbers = report::to_json(rep);
  c.numbers["skipped_short_paths"] = o.ensemble - samples.size();
  Criterion s;
  s.id = "increments/sandwich";
  s.description = "plain-increment tail probability <= sup-increment tail probability at every grid point";
  s.pass = rep.sandwich_violations == 0;
  s.numbers = {{"violations", rep.sandwich_violations}, {"grid_points", rep.lambda_grid.size()}};
  v.criteria.push_back(std::move(c));
  v.criteria.push_back(std::move(s));
  return v;
}

// ---------------------------------------------------------------------------

Verdict remaining_time(const RemainingTimeOptions& o, std::uint64_t seed, unsigned workers) {
  Verdict v;
  v.suite = "remaining-time";
  v.config = {{"family", report::to_json(o.family)},
              {"depth", o.depth},
              {"level", o.level},
              {"records", o.records},
              {"records_per_path", o.records_per_path},
              {"duration_mode", "sampled"},
              {"w_generations", o.w_generations},
              {"tolerance", o.tolerance}};
  if (o.records_per_path == 0) throw Error(Errc::invalid_argument, "records_per_path must be >= 1");
  const auto dist = make_offspring(o.family);
  auto base = base_config(o.family, o.depth);
  base.durations = {DurationMode::sampled, o.w_generations};
  const std::size_t paths = (o.records + o.records_per_path - 1) / o.records_per_path;
  std::vector<std::vector<RemainingTimeRecord>> slots(paths);
  parallel_for(paths, workers, [&](std::size_t i) {
    const auto path = simulate(member_config(base, seed, i));
    const auto pn = extract_passage_times(path, o.level);
    const auto pn1 = extract_passage_times(path, o.level + 1);
    Rng rng = make_stream(seed, StreamTag::query_time, i);
    for (std::size_t r = 0; r < o.records_per_path; ++r) {
      const double s = path.start_time() + uniform01(rng) * kQueryFraction * path.span();
      if (auto rec = remaining_time_record(pn, pn1, o.level, s)) slots[i].push_back(*rec);
    }
  });
  std::vector<RemainingTimeRecord> records;
  for (const auto& s : slots) {
    for (const auto& r : s) {
      if (records.size() < o.records) records.push_back(r);
    }
  }
  const auto rep = remaining_time_tail(records, dist.mu(), {});
  Criterion c;
  c.id = "remaining-time/exponent";
  c.description = "slope of log(-log P(gap<=x)) vs log(mu^-n x) within tolerance of -H/(1-H)";
  c.pass = relative_error(rep.fit.slope, rep.fit.target_exponent) <= o.tolerance;
  c.numbers = report::to_json(rep);
  Criterion m;
  m.id = "remaining-time/monotone";
  m.description = "gaps are non-negative and the empirical cdf is non-decreasing on the grid";
  m.pass = std::all_of(records.begin(), records.end(), [](const auto& r) { return r.gap >= 0.0; }) &&
           std::is_sorted(rep.p_hat.begin(), rep.p_hat.end());
  m.numbers = {{"records", records.size()}};
  v.criteria.push_back(std::move(c));
  v.criteria.push_back(std::move(m));
  return v;
}

// ---------------------------------------------------------------------------

Verdict modulus(const ModulusOptions& o, std::uint64_t seed, unsigned workers) {
  Verdict v;
  v.suite = "modulus";
  v.config = {{"families", family_list(o.families)},
              {"resolution_bits", o.resolution_bits},
              {"seeds", o.seeds},
              {"levels", {o.l_min, o.l_max}},
              {"split_level", o.l_mid},
              {"band_ratio", o.band_ratio},
              {"half_variation", o.half_variation},
              {"brute_force_paths", o.brute_force_paths},
              {"brute_force_factor", o.brute_force_factor}};
  if (!(o.l_min < o.l_mid && o.l_mid < o.l_max)) throw Error(Errc::invalid_argument, "need l_min < l_mid < l_max");
  for (std::size_t fi = 0; fi < o.families.size(); ++fi) {
    const auto dist = make_offspring(o.families[fi]);
    const double h = dist.hurst();
    const int depth = depth_for_resolution(dist, o.resolution_bits);
    const auto base = base_config(o.families[fi], depth);
    std::vector<ModulusReport> reps(o.seeds);
    parallel_for(o.seeds, workers, [&](std::size_t j) {
      const auto path = unit_window(member_config(base, seed, fi * 1'000'000 + j));
      reps[j] = modulus_ratio(path, o.l_min, o.l_max, h, o.band_ratio);
    });
    auto band = [&](int lo, int hi) {
      double a = std::numeric_limits<double>::infinity(), b = 0.0;
      for (const auto& r : reps) {
        for (std::size_t i = 0; i < r.levels.size(); ++i) {
          if (r.levels[i] < lo || r.levels[i] > hi) continue;
          a = std::min(a, r.ratios[i]);
          b = std::max(b, r.ratios[i]);
        }
      }
      return std::pair{a, b};
    };
    const auto [a, b] = band(o.l_min, o.l_max);
    const auto [a1, b1] = band(o.l_min, o.l_mid);
    const auto [a2, b2] = band(o.l_mid, o.l_max);
    Json per_level = Json::array();
    for (int l = o.l_min; l <= o.l_max; ++l) {
      const auto [lo, hi] = band(l, l);
      per_level.push_back({{"l", l}, {"min", lo}, {"max", hi}});
    }
    Criterion c;
    c.id = "modulus-band/" + label(o.families[fi]);
    c.description = "all R(delta_l) over seeds and levels in [a, b] with a > 0 and b/a within bound";
    c.pass = a > 0.0 && b / a <= o.band_ratio;
    c.numbers = {{"hurst", h}, {"depth", depth}, {"a", a}, {"b", b}, {"b_over_a", b / a}, {"per_level", per_level}};
    Criterion s;
    s.id = "modulus-halves/" + label(o.families[fi]);
    s.description = "band endpoints on the coarse and fine halves of the level range differ by less than the bound";
    const double va = std::abs(a2 - a1) / a1;
    const double vb = std::abs(b2 - b1) / b1;
    s.pass = va < o.half_variation && vb < o.half_variation;
    s.numbers = {{"coarse", {a1, b1}}, {"fine", {a2, b2}}, {"lower_variation", va}, {"upper_variation", vb}};
    v.criteria.push_back(std::move(c));
    v.criteria.push_back(std::move(s));

    // All-pairs cross-check on small paths.
    const int small_depth = std::max(1, static_cast<int>(std::floor(12.0 * h - 1e-9)) - 1);
    const auto small = base_config(o.families[fi], small_depth);
    Criterion bf;
    bf.id = "modulus-bruteforce/" + label(o.families[fi]);
    bf.description = "all-pairs R and discretised R agree within the factor on paths with at most 4096 segments";
    bf.pass = true;
    double worst = 1.0;
    std::size_t used = 0;
    for (std::size_t j = 0; used < o.brute_force_paths && j < 100 * o.brute_force_paths; ++j) {
      const auto path = unit_window(member_config(small, seed, 500'000'000 + fi * 1'000'000 + j));
      const auto segments = path.size() - 1;
      if (segments > kBruteForceMaxSegments) continue;
      const int l_max = std::min(o.l_max, static_cast<int>(std::floor(std::log2(static_cast<double>(segments)))));
      if (l_max <= o.l_min) continue;
      const auto fast = modulus_ratio(path, o.l_min, l_max, h, o.band_ratio);
      const auto slow = modulus_ratio_bruteforce(path, o.l_min, l_max, h, o.band_ratio);
      for (std::size_t i = 0; i < fast.ratios.size(); ++i) {
        const double q = slow.ratios[i] / fast.ratios[i];
        worst = std::max({worst, q, 1.0 / q});
      }
      ++used;
    }
    bf.pass = used > 0 && worst <= o.brute_force_factor;
    bf.numbers = {{"paths", used}, {"depth", small_depth}, {"worst_factor", worst}};
    v.criteria.push_back(std::move(bf));
  }
  return v;
}

// ---------------------------------------------------------------------------

Verdict holder(const HolderOptions& o, std::uint64_t seed, unsigned /*workers*/) {
  Verdict v;
  v.suite = "holder";
  const auto dist = make_offspring(o.family);
  const int depth = depth_for_resolution(dist, o.resolution_bits);
  v.config = {{"family", report::to_json(o.family)},
              {"resolution_bits", o.resolution_bits},
              {"depth", depth},
              {"grid", o.grid},
              {"shallow_eps_levels", {o.shallow.coarsest, o.shallow.finest}},
              {"deep_eps_levels", {o.deep.coarsest, o.deep.finest}},
              {"tolerance", o.tolerance}};
  const auto path = unit_window(member_config(base_config(o.family, depth), seed, 0));
  const auto shallow = holder_histogram(path, o.grid, o.shallow);
  const auto deep = holder_histogram(path, o.grid, o.deep);
  Criterion m;
  m.id = "holder/mean";
  m.description = "mean local exponent over the grid within tolerance of H (deep epsilon range)";
  m.pass = std::abs(deep.mean - dist.hurst()) <= o.tolerance;
  m.numbers = {{"hurst", dist.hurst()}, {"deep", report::to_json(deep)}};
  Criterion s;
  s.id = "holder/spread";
  s.description = "std of local exponents strictly decreases from the shallow to the deep epsilon range";
  s.pass = deep.stddev < shallow.stddev;
  s.numbers = {{"shallow_std", shallow.stddev}, {"deep_std", deep.stddev}, {"shallow_mean", shallow.mean}};

  SamplePath ramp;
  const std::size_t segments = std::size_t{1} << 14;
  for (std::size_t i = 0; i <= segments; ++i) {
    const double t = static_cast<double>(i) / static_cast<double>(segments);
    ramp.times.push_back(t);
    ramp.values.push_back(t);
  }
  ramp.origin = PathOrigin::ingested;
  ramp.resolution_level = -14;
  const auto control = holder_histogram(ramp, o.grid, o.deep);
  double dev = 0.0;
  for (double e : control.exponents) dev = std::max(dev, std::abs(e - 1.0));
  Criterion c;
  c.id = "holder/ramp-control";
  c.description = "X(t) = t gives exponent 1 within 1e-6 at every grid point";
  c.pass = dev <= 1e-6;
  c.numbers = {{"max_deviation", dev}};
  v.criteria.push_back(std::move(m));
  v.criteria.push_back(std::move(s));
  v.criteria.push_back(std::move(c));
  return v;
}

// ---------------------------------------------------------------------------

Verdict scale_invariance(const ScaleInvarianceOptions& o, std::uint64_t seed, unsigned workers) {
  Verdict v;
  v.suite = "scale-invariance";
  v.config = {{"family", report::to_json(o.family)},
              {"depth", o.depth},
              {"paths", o.paths},
              {"duration_mode", "sampled"},
              {"w_generations", o.w_generations},
              {"min_crossings", o.min_crossings},
              {"max_ks", o.max_ks},
              {"wrong_mu_factor", o.wrong_mu_factor},
              {"control_min_ks", o.control_min_ks}};
  const auto dist = make_offspring(o.family);
  auto base = base_config(o.family, o.depth);
  base.durations = {DurationMode::sampled, o.w_generations};
  std::vector<CrossingForest> forests(o.paths);
  parallel_for(o.paths, workers, [&](std::size_t i) {
    forests[i] = extract_crossing_forest(simulate(member_config(base, seed, i)), -o.depth, 0);
  });
  const auto rep = duration_scale_invariance(forests, dist.mu(), o.min_crossings);
  const auto control = duration_scale_invariance(forests, dist.mu() * o.wrong_mu_factor, o.min_crossings);
  Criterion c;
  c.id = "scale-invariance/adjacent-ks";
  c.description = "KS distance of mu^-n D^n between adjacent levels below the bound";
  c.pass = rep.max_ks < o.max_ks;
  c.numbers = report::to_json(rep);
  Criterion n;
  n.id = "scale-invariance/wrong-mu-control";
  n.description = "rescaling with a wrong mu pushes the adjacent-level KS distance above the control bound";
  n.pass = control.max_ks > o.control_min_ks;
  n.numbers = report::to_json(control);
  v.criteria.push_back(std::move(c));
  v.criteria.push_back(std::move(n));
  return v;
}

// ---------------------------------------------------------------------------

Verdict assumptions(const AssumptionOptions& o) {
  Verdict v;
  v.suite = "assumptions";
  v.config = {{"family", report::to_json(o.family)},
              {"zeta_max", o.zeta_max},
              {"y_max", o.y_max ? Json(*o.y_max) : Json(nullptr)}};
  const auto dist = make_offspring(o.family);
  const auto gw = check_assumption_gw(dist);
  Criterion m;
  m.id = "assumptions/moments";
  m.description = "mu > 2 and E[Z log Z] finite";
  m.pass = gw.pass;
  m.numbers = report::to_json(gw);
  m.numbers["hurst"] = dist.hurst();
  m.numbers["pi"] = dist.pi();
  const auto dom = check_assumption_z(dist, o.zeta_max, o.y_max);
  Criterion d;
  d.id = "assumptions/dominance";
  d.description = "some zeta in [0, zeta_max] with Z + zeta stochastically dominating every residual Z - y";
  d.pass = dom.zeta.has_value();
  d.numbers = report::to_json(dom);
  const auto mm = mean_offspring_matrix(dist.mu(), dist.mu());
  Criterion e;
  e.id = "assumptions/mean-matrix";
  e.description = "symmetric mean matrix has eigenvalues {mu, 2} and left eigenvector (1/2, 1/2)";
  e.pass = std::abs(mm.dominant_eigenvalue - dist.mu()) <= 1e-12 * dist.mu() &&
           std::abs(mm.second_eigenvalue - 2.0) <= 1e-12 * dist.mu() &&
           std::abs(mm.left_eigenvector[0] - 0.5) <= 1e-12 && std::abs(mm.left_eigenvector[1] - 0.5) <= 1e-12;
  e.numbers = report::to_json(mm);
  v.criteria.push_back(std::move(m));
  v.criteria.push_back(std::move(d));
  v.criteria.push_back(std::move(e));
  return v;
}

// ---------------------------------------------------------------------------

Verdict round_trip(const RoundTripOptions& o, std::uint64_t seed, unsigned workers) {
  Verdict v;
  v.suite = "round-trip";
  v.config = {{"families", family_list(o.families)},
              {"seeds", o.seeds},
              {"depth", o.depth},
              {"time_tolerance", o.time_tolerance}};
  for (std::size_t fi = 0; fi < o.families.size(); ++fi) {
    const auto base = base_config(o.families[fi], o.depth);
    struct Slot {
      bool ok = false;
      double time_error = 0.0;
      std::string mismatch;
    };
    std::vector<Slot> slots(o.seeds);
    parallel_for(o.seeds, workers, [&](std::size_t j) {
      const auto r = simulate_detailed(member_config(base, seed, fi * 1'000'000 + j));
      const auto f = extract_crossing_forest(r.path, -o.depth, 0);
      const auto cmp = compare_forest_to_tree(f, r.trees.front());
      const auto bad = validate_forest(f);
      slots[j].time_error = cmp.max_time_error;
      slots[j].ok = cmp.counts_match && cmp.orientations_match && cmp.max_time_error <= o.time_tolerance && !bad;
      if (cmp.first_mismatch) slots[j].mismatch = *cmp.first_mismatch;
      if (bad) slots[j].mismatch = *bad;
    });
    Criterion c;
    c.id = "round-trip/" + label(o.families[fi]);
    c.description = "extracted forests match generating trees in counts and orientations, times within tolerance";
    std::size_t failed = 0;
    double worst = 0.0;
    Json first = nullptr;
    for (std::size_t j = 0; j < slots.size(); ++j) {
      worst = std::max(worst, slots[j].time_error);
      if (!slots[j].ok) {
        if (failed == 0) first = {{"member", j}, {"detail", slots[j].mismatch}};
        ++failed;
      }
    }
    c.pass = failed == 0;
    c.numbers = {{"seeds", o.seeds}, {"failed", failed}, {"max_time_error", worst}, {"first_failure", first}};
    v.criteria.push_back(std::move(c));
  }
  return v;
}

// ---------------------------------------------------------------------------

Verdict brownian(const BrownianOptions& o, std::uint64_t seed) {
  Verdict v;
  v.suite = "brownian";
  v.config = {{"walk_steps", o.walk_steps},
              {"walk_levels", {o.walk_level_lo, o.walk_level_hi}},
              {"cebp_family", report::to_json(FamilySpec::geometric(0.5))},
              {"cebp_depth", o.cebp_depth},
              {"max_tv", o.max_tv},
              {"hurst_tolerance", o.hurst_tolerance}};
  auto add = [&](const std::string& who, const CrossingForest& f) {
    const auto pmf = subcrossing_pmf(f);
    const double tv = tv_distance_to_geometric_pairs(pmf);
    const auto est = estimate_hurst(f);
    Json pj = Json::object();
    for (const auto& [z, p] : pmf) {
      if (z <= 12) pj[std::to_string(z)] = p;
    }
    Criterion a;
    a.id = "brownian/" + who + "-pmf";
    a.description = "subcrossing pmf within total variation of pmf(2k) = 2^-k";
    a.pass = tv < o.max_tv;
    a.numbers = {{"tv", tv}, {"pmf_head", pj}};
    Criterion h;
    h.id = "brownian/" + who + "-hurst";
    h.description = "hurst_hat within tolerance of 1/2";
    h.pass = std::abs(est.hurst_hat - 0.5) <= o.hurst_tolerance;
    h.numbers = report::to_json(est);
    v.criteria.push_back(std::move(a));
    v.criteria.push_back(std::move(h));
  };
  {
    SamplePath walk;
    walk.times.resize(o.walk_steps + 1);
    walk.values.resize(o.walk_steps + 1);
    Rng rng = make_stream(seed, StreamTag::random_walk);
    double x = 0.0;
    for (std::size_t i = 0; i <= o.walk_steps; ++i) {
      walk.times[i] = static_cast<double>(i);
      walk.values[i] = x;
      x += coin(rng) ? 1.0 : -1.0;
    }
    walk.origin = PathOrigin::ingested;
    add("random-walk", extract_crossing_forest(walk, o.walk_level_lo, o.walk_level_hi));
  }
  {
    const auto path = simulate(member_config(base_config(FamilySpec::geometric(0.5), o.cebp_depth), seed, 0));
    add("cebp", extract_crossing_forest(path, -o.cebp_depth, 0));
  }
  return v;
}

}  // namespace cebp::verify
