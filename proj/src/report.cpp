#include "cebp/report.hpp"

#include <charconv>
#include <cmath>
#include <ostream>

#include "cebp/error.hpp"

#ifndef CEBP_VERSION
#define CEBP_VERSION "0.0.0"
#endif

namespace cebp::report {

std::string_view tool_version() noexcept { return CEBP_VERSION; }

Json provenance(const Json& config, std::uint64_t seed) {
  Json j;
  j["tool"] = "cebp";
  j["version"] = tool_version();
  j["seed"] = seed;
  j["config"] = config;
  return j;
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

std::string format_double(double v) {
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

namespace {

Json number_or_null(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

Json numbers(std::span<const double> v) {
  Json a = Json::array();
  for (double x : v) a.push_back(number_or_null(x));
  return a;
}

[[noreturn]] void bad(const std::string& why) { throw Error(Errc::invalid_argument, why); }

template <typename T>
T get_or(const Json& j, const char* key, T fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    bad(std::string("config field '") + key + "' has the wrong type");
  }
}

}  // namespace

Json to_json(const FamilySpec& spec) {
  Json j;
  j["family"] = family_name(spec.family);
  switch (spec.family) {
    case Family::geometric_pairs: j["p"] = spec.param; break;
    case Family::poisson_pairs: j["lambda"] = spec.param; break;
    case Family::fixed_pairs: j["b"] = static_cast<int>(spec.param); break;
    case Family::custom: {
      Json pmf = Json::object();
      for (const auto& e : spec.table) pmf[std::to_string(e.z)] = e.p;
      j["pmf"] = pmf;
      break;
    }
  }
  return j;
}

FamilySpec family_from_json(const Json& j) {
  if (!j.is_object() || !j.contains("family")) bad("offspring needs a 'family' field");
  const auto f = parse_family(get_or<std::string>(j, "family", ""));
  switch (f) {
    case Family::geometric_pairs:
      if (!j.contains("p")) bad("geometric-pairs needs 'p'");
      return FamilySpec::geometric(get_or<double>(j, "p", 0.0));
    case Family::poisson_pairs:
      if (!j.contains("lambda")) bad("poisson-pairs needs 'lambda'");
      return FamilySpec::poisson(get_or<double>(j, "lambda", 0.0));
    case Family::fixed_pairs:
      if (!j.contains("b")) bad("fixed-pairs needs 'b'");
      return FamilySpec::fixed(get_or<int>(j, "b", 0));
    case Family::custom: {
      if (!j.contains("pmf") || !j.at("pmf").is_object()) bad("custom needs a 'pmf' object {\"z\": p}");
      std::vector<PmfEntry> table;
      for (const auto& [k, v] : j.at("pmf").items()) {
        int z = 0;
        const auto r = std::from_chars(k.data(), k.data() + k.size(), z);
        if (r.ec != std::errc() || r.ptr != k.data() + k.size() || !v.is_number()) bad("bad pmf entry '" + k + "'");
        table.push_back({z, v.get<double>()});
      }
      std::sort(table.begin(), table.end(), [](const PmfEntry& a, const PmfEntry& b) { return a.z < b.z; });
      return FamilySpec::custom(std::move(table));
    }
  }
  bad("unknown family");
}

Json to_json(const SimulationConfig& c) {
  Json j;
  j["offspring"] = to_json(c.offspring);
  j["depth"] = c.depth;
  j["duration_mode"] = c.durations.mode == DurationMode::mean ? "mean" : "sampled";
  j["w_generations"] = c.durations.w_generations;
  j["root_mode"] = c.root_mode == RootMode::single ? "single" : "tile";
  j["target_horizon"] = c.target_horizon;
  j["seed"] = c.seed;
  j["node_budget"] = c.node_budget;
  return j;
}

SimulationConfig simulation_config_from_json(const Json& j) {
  if (!j.is_object()) bad("simulation config must be an object");
  SimulationConfig c;
  if (j.contains("offspring")) c.offspring = family_from_json(j.at("offspring"));
  c.depth = get_or<int>(j, "depth", c.depth);
  const auto mode = get_or<std::string>(j, "duration_mode", "mean");
  if (mode == "mean") {
    c.durations.mode = DurationMode::mean;
  } else if (mode == "sampled") {
    c.durations.mode = DurationMode::sampled;
  } else {
    bad("duration_mode must be 'mean' or 'sampled'");
  }
  c.durations.w_generations = get_or<int>(j, "w_generations", c.durations.w_generations);
  const auto root = get_or<std::string>(j, "root_mode", "single");
  if (root == "single") {
    c.root_mode = RootMode::single;
  } else if (root == "tile") {
    c.root_mode = RootMode::tile;
  } else {
    bad("root_mode must be 'single' or 'tile'");
  }
  c.target_horizon = get_or<double>(j, "target_horizon", c.target_horizon);
  c.seed = get_or<std::uint64_t>(j, "seed", c.seed);
  c.node_budget = get_or<std::uint64_t>(j, "node_budget", c.node_budget);
  return c;
}

Json to_json(const TailFit& f) {
  Json j;
  j["slope"] = number_or_null(f.slope);
  j["intercept"] = number_or_null(f.intercept);
  j["r_squared"] = number_or_null(f.r_squared);
  j["target_exponent"] = f.target_exponent;
  j["relative_error"] = number_or_null(f.relative_error());
  j["points"] = f.abscissa.size();
  j["abscissa"] = numbers(f.abscissa);
  j["p_hat"] = numbers(f.p_hat);
  j["log_minus_log_p"] = numbers(f.log_minus_log_prob);
  return j;
}

void write_tail_fit_csv(const TailFit& f, std::ostream& out) {
  out << "x,p_hat,log_minus_log_p\n";
  for (std::size_t i = 0; i < f.abscissa.size(); ++i) {
    out << format_double(f.abscissa[i]) << ',' << format_double(f.p_hat[i]) << ','
        << format_double(f.log_minus_log_prob[i]) << '\n';
  }
}

void write_w_ensemble_csv(const WEnsemble& e, std::ostream& out) {
  out << "sample_index,w_value\n";
  for (std::size_t i = 0; i < e.samples.size(); ++i) out << i << ',' << format_double(e.samples[i]) << '\n';
}

Json to_json(const MeanMatrix& m) {
  Json j;
  j["mu_plus"] = m.mu_plus;
  j["mu_minus"] = m.mu_minus;
  j["entries"] = {{m.entries[0][0], m.entries[0][1]}, {m.entries[1][0], m.entries[1][1]}};
  j["dominant_eigenvalue"] = m.dominant_eigenvalue;
  j["second_eigenvalue"] = m.second_eigenvalue;
  j["left_eigenvector"] = {m.left_eigenvector[0], m.left_eigenvector[1]};
  j["right_eigenvector"] = {m.right_eigenvector[0], m.right_eigenvector[1]};
  return j;
}

Json to_json(const GwAssumptionReport& r) {
  Json j;
  j["mu"] = r.mu;
  j["mu_supercritical"] = r.mu_supercritical;
  j["e_z_log_z"] = number_or_null(r.e_z_log_z);
  j["e_z_log_z_finite"] = r.e_z_log_z_finite;
  j["pass"] = r.pass;
  return j;
}

Json to_json(const DominanceCheckResult& r) {
  Json j;
  j["zeta"] = r.zeta ? Json(*r.zeta) : Json(nullptr);
  j["checked_y_range"] = {r.checked_y_range.first, r.checked_y_range.second};
  Json v = Json::array();
  for (auto [y, z] : r.violations) v.push_back({{"y", y}, {"z", z}});
  j["violations"] = v;
  return j;
}

Json to_json(const HurstEstimate& e) {
  Json j;
  j["mu_hat"] = e.mu_hat;
  j["hurst_hat"] = e.hurst_hat;
  j["stderr"] = e.stderr_hurst;
  j["stderr_mu"] = e.stderr_mu;
  j["parents"] = e.parents;
  j["duration_slope"] = e.duration_slope ? number_or_null(*e.duration_slope) : Json(nullptr);
  j["hurst_hat_duration"] = e.hurst_hat_duration ? number_or_null(*e.hurst_hat_duration) : Json(nullptr);
  Json levels = Json::array();
  for (const auto& l : e.per_level) {
    levels.push_back({{"level", l.level},
                      {"parents", l.parents},
                      {"mean_count", l.mean_count},
                      {"mean_duration", l.mean_duration}});
  }
  j["per_level_counts"] = levels;
  return j;
}

Json to_json(const ModulusReport& r) {
  Json j;
  j["hurst"] = r.hurst;
  j["levels"] = r.levels;
  j["deltas"] = numbers(r.deltas);
  j["ratios"] = numbers(r.ratios);
  if (!r.lattice_increment_max.empty()) j["lattice_increment_max"] = numbers(r.lattice_increment_max);
  if (!r.block_sup_max.empty()) j["block_sup_max"] = numbers(r.block_sup_max);
  j["ratio_min"] = r.ratio_min;
  j["ratio_max"] = r.ratio_max;
  j["stability_bound"] = r.stability_bound;
  j["stable"] = r.stable;
  return j;
}

Json to_json(const HolderEstimate& h) {
  Json j;
  j["eps_levels"] = {h.eps.coarsest, h.eps.finest};
  j["grid_size"] = h.grid_times.size();
  j["mean"] = h.mean;
  j["stddev"] = h.stddev;
  j["bin_width"] = h.bin_width;
  j["histogram"] = h.histogram;
  j["coarse_spectrum"] = numbers(h.coarse_spectrum);
  return j;
}

Json to_json(const IncrementTailReport& r) {
  Json j;
  j["t"] = r.t;
  j["hurst"] = r.hurst;
  j["samples"] = r.samples;
  j["query_window"] = "uniform s over the first 90% of the path span";
  j["lambda_grid"] = numbers(r.lambda_grid);
  j["p_plain"] = numbers(r.p_plain);
  j["p_sup"] = numbers(r.p_sup);
  j["sandwich_violations"] = r.sandwich_violations;
  j["fit"] = to_json(r.fit);
  j["sup_fit"] = r.sup_fit ? to_json(*r.sup_fit) : Json(nullptr);
  return j;
}

Json to_json(const RemainingTimeReport& r) {
  Json j;
  j["n"] = r.n;
  j["mu"] = r.mu;
  j["hurst"] = r.hurst;
  j["records"] = r.records;
  j["query_window"] = "uniform s over the first 90% of the path span";
  j["x_grid"] = numbers(r.x_grid);
  j["p_hat"] = numbers(r.p_hat);
  j["fit"] = to_json(r.fit);
  j["mean_y"] = r.mean_y;
  Json hist = Json::object();
  for (const auto& [y, c] : r.y_histogram) hist[std::to_string(y)] = c;
  j["y_histogram"] = hist;
  return j;
}

Json to_json(const ScaleInvarianceReport& r) {
  Json j;
  j["mu"] = r.mu;
  j["max_ks"] = r.max_ks;
  Json pairs = Json::array();
  for (const auto& p : r.pairs) {
    pairs.push_back({{"level_a", p.level_a}, {"level_b", p.level_b}, {"n_a", p.n_a}, {"n_b", p.n_b}, {"ks", p.ks}});
  }
  j["pairs"] = pairs;
  return j;
}

void write_forest_ndjson(const CrossingForest& forest, std::ostream& out) {
  for (const auto& lv : forest.levels) {
    for (std::size_t k = 0; k < lv.records.size(); ++k) {
      const auto& r = lv.records[k];
      Json j;
      j["level"] = lv.level;
      j["index"] = k;
      j["start_time"] = r.start_time;
      j["end_time"] = r.end_time;
      j["orientation"] = std::string(1, symbol(r.orientation));
      j["subcrossing_count"] = r.subcrossing_count;
      j["duration"] = r.duration;
      j["first_subrecord"] = r.first_subrecord;
      out << j.dump() << '\n';
    }
  }
}

Json path_sidecar(const SamplePath& path, const Json& config, std::uint64_t seed) {
  Json j;
  j["resolution_level"] = path.resolution_level;
  j["hurst"] = path.hurst ? Json(*path.hurst) : Json(nullptr);
  j["mu"] = path.mu ? Json(*path.mu) : Json(nullptr);
  j["origin"] = path.origin == PathOrigin::simulated ? "simulated" : "ingested";
  j["knots"] = path.size();
  const Json prov = provenance(config, seed);
  for (const auto& [k, v] : prov.items()) j[k] = v;
  return j;
}

void write_xy_csv(std::span<const double> x, std::span<const double> y, std::ostream& out, std::string_view x_name,
                  std::string_view y_name) {
  out << x_name << ',' << y_name << '\n';
  for (std::size_t i = 0; i < x.size() && i < y.size(); ++i) {
    out << format_double(x[i]) << ',' << format_double(y[i]) << '\n';
  }
}

}  // namespace cebp::report
