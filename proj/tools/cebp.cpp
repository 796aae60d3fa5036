// cebp: simulate | analyze | verify | check-dist | ingest | validate
//
// Exit codes: 0 success, 2 config/usage, 3 resource budget, 4 analysis failure
// (including a verify run whose criteria do not all pass).

#include <CLI11.hpp>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

#include "cebp/error.hpp"
#include "cebp/report.hpp"
#include "cebp/verify.hpp"

using namespace cebp;
using report::Json;

namespace {

enum Exit : int { kOk = 0, kUsage = 2, kBudget = 3, kAnalysis = 4 };

int exit_code_for(Errc e) {
  switch (e) {
    case Errc::invalid_argument:
    case Errc::mu_not_supercritical:
    case Errc::invalid_pmf:
    case Errc::invalid_z:
      return kUsage;
    case Errc::node_budget_exceeded:
    case Errc::depth_overflow:
      return kBudget;
    default:
      return kAnalysis;
  }
}

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Options that steer I/O or scheduling and never enter the embedded config.
const std::set<std::string> kNotConfig{"--config", "--out", "--workers", "--emit-plots", "--help"};

std::string option_key(const CLI::Option* o) {
  const auto& names = o->get_lnames();
  if (!names.empty()) return names.front();
  return o->get_name();
}

Json scalar_from_string(const std::string& s) {
  try {
    const auto j = Json::parse(s);
    if (j.is_number() && j.dump() == s) return j;
    if (j.is_boolean()) return j;
  } catch (const nlohmann::json::exception&) {
  }
  return s;
}

std::string scalar_to_string(const Json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number() || v.is_boolean()) return v.dump();
  throw UsageError("config values must be strings, numbers or booleans");
}

/// Fills options not given on the command line from a JSON config. The file
/// may be a plain {"flag-name": value} map or any artifact that embeds one
/// under "config".
void apply_config(CLI::App* sub, const std::string& file) {
  std::ifstream in(file);
  if (!in) throw UsageError("cannot open config file " + file);
  Json j;
  try {
    j = Json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw UsageError("config file " + file + ": " + e.what());
  }
  if (j.contains("config") && j["config"].is_object()) j = j["config"];
  if (!j.is_object()) throw UsageError("config file must hold a JSON object");
  for (const auto& [key, value] : j.items()) {
    CLI::Option* opt = nullptr;
    for (auto* o : sub->get_options()) {
      if (!o->get_positional() || o->get_lnames().empty()) {
        if (option_key(o) == key) opt = o;
      }
      if (o->get_positional() && o->get_name() == key) opt = o;
    }
    if (opt == nullptr) throw UsageError("unknown config key '" + key + "' for " + sub->get_name());
    if (kNotConfig.count("--" + key)) continue;
    if (opt->count() > 0) continue;  // flags win
    opt->add_result(scalar_to_string(value));
    opt->run_callback();
  }
}

/// Resolved configuration: every option with a value, given or defaulted.
Json resolved_config(const CLI::App* sub) {
  Json j = Json::object();
  for (const auto* o : sub->get_options()) {
    const std::string key = option_key(o);
    if (kNotConfig.count("--" + key) || key.empty() || key == "help") continue;
    std::string value;
    if (o->count() > 0) {
      value = o->results().front();
    } else {
      value = o->get_default_str();
    }
    if (value.empty()) continue;
    j[key] = scalar_from_string(value);
  }
  return j;
}

void write_file(const std::filesystem::path& p, const std::string& content) {
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
  std::ofstream out(p, std::ios::binary);
  if (!out) throw UsageError("cannot write " + p.string());
  out << content;
}

std::pair<int, int> parse_range(const std::string& s, const char* what) {
  const auto colon = s.find(':', s.front() == '-' ? 1 : 0);
  try {
    if (colon == std::string::npos) throw std::invalid_argument(s);
    std::size_t used = 0;
    const int a = std::stoi(s.substr(0, colon), &used);
    if (used != colon) throw std::invalid_argument(s);
    const auto rest = s.substr(colon + 1);
    const int b = std::stoi(rest, &used);
    if (used != rest.size()) throw std::invalid_argument(s);
    if (b < a) throw std::invalid_argument(s);
    return {a, b};
  } catch (const std::exception&) {
    throw UsageError(std::string(what) + " must look like LO:HI with LO <= HI, got '" + s + "'");
  }
}

// ---------------------------------------------------------------------------

struct FamilyFlags {
  std::string family = "geometric-pairs";
  double p = 0.5;
  double lambda = 1.0;
  int b = 2;
  std::string pmf;
  std::optional<double> hurst;

  void add(CLI::App* app, bool with_hurst) {
    app->add_option("--family", family, "geometric-pairs | poisson-pairs | fixed-pairs | custom")
        ->capture_default_str();
    app->add_option("--p", p, "geometric-pairs parameter")->capture_default_str();
    app->add_option("--lambda", lambda, "poisson-pairs parameter")->capture_default_str();
    app->add_option("--b", b, "fixed-pairs parameter (Z = 2b)")->capture_default_str();
    app->add_option("--pmf", pmf, "custom table, e.g. 2:0.5,4:0.5");
    if (with_hurst) app->add_option("--H", hurst, "shorthand for geometric-pairs with mean 2^(1/H)");
  }

  FamilySpec spec() const {
    if (hurst) {
      if (!(*hurst > 0.0 && *hurst < 1.0)) throw Error(Errc::invalid_argument, "--H must lie in (0, 1)");
      return FamilySpec::geometric(std::pow(2.0, 1.0 - 1.0 / *hurst));
    }
    switch (parse_family(family)) {
      case Family::geometric_pairs: return FamilySpec::geometric(p);
      case Family::poisson_pairs: return FamilySpec::poisson(lambda);
      case Family::fixed_pairs: return FamilySpec::fixed(b);
      case Family::custom: {
        if (pmf.empty()) throw Error(Errc::invalid_argument, "custom family needs --pmf");
        std::vector<PmfEntry> table;
        std::stringstream ss(pmf);
        std::string item;
        while (std::getline(ss, item, ',')) {
          const auto colon = item.find(':');
          try {
            if (colon == std::string::npos) throw std::invalid_argument(item);
            table.push_back({std::stoi(item.substr(0, colon)), std::stod(item.substr(colon + 1))});
          } catch (const std::exception&) {
            throw Error(Errc::invalid_argument, "bad --pmf entry '" + item + "'");
          }
        }
        return FamilySpec::custom(std::move(table));
      }
    }
    throw Error(Errc::invalid_argument, "unknown family");
  }
};

struct Globals {
  std::uint64_t seed = 0;
  unsigned workers = 1;
  bool emit_plots = false;
  std::string config;
};

void add_globals(CLI::App* sub, Globals& g) {
  sub->add_option("--seed", g.seed, "master seed")->capture_default_str();
  sub->add_option("--workers", g.workers, "worker threads (results do not depend on it)")->capture_default_str();
  sub->add_flag("--emit-plots", g.emit_plots, "also write two-column CSVs for gnuplot");
  sub->add_option("--config", g.config, "JSON config file or artifact; flags override it");
}

// ---------------------------------------------------------------------------

struct SimulateCmd {
  FamilyFlags fam;
  std::optional<int> depth;
  std::string duration_mode = "mean";
  int w_generations = 12;
  std::string root_mode = "single";
  double horizon = 1.0;
  std::uint64_t node_budget = kDefaultNodeBudget;
  std::string out = "cebp_path";

  void add(CLI::App* app) {
    fam.add(app, false);
    app->add_option("--depth", depth, "tree depth m (leaves at level -m)");
    app->add_option("--duration-mode", duration_mode, "mean | sampled")->capture_default_str();
    app->add_option("--w-generations", w_generations, "generations per leaf W draw in sampled mode")
        ->capture_default_str();
    app->add_option("--root-mode", root_mode, "single | tile")->capture_default_str();
    app->add_option("--horizon", horizon, "tile mode: time to cover")->capture_default_str();
    app->add_option("--node-budget", node_budget, "maximum tree nodes")->capture_default_str();
    app->add_option("--out", out, "output prefix")->capture_default_str();
  }

  int run(CLI::App* app, const Globals& g) {
    if (!depth) throw UsageError("--depth is required\n" + app->help());
    SimulationConfig c;
    c.offspring = fam.spec();
    c.depth = *depth;
    if (duration_mode == "mean") {
      c.durations.mode = DurationMode::mean;
    } else if (duration_mode == "sampled") {
      c.durations.mode = DurationMode::sampled;
    } else {
      throw UsageError("--duration-mode must be mean or sampled");
    }
    c.durations.w_generations = w_generations;
    if (root_mode == "single") {
      c.root_mode = RootMode::single;
    } else if (root_mode == "tile") {
      c.root_mode = RootMode::tile;
    } else {
      throw UsageError("--root-mode must be single or tile");
    }
    c.target_horizon = horizon;
    c.seed = g.seed;
    c.node_budget = node_budget;
    validate_config(c);
    (void)make_offspring(c.offspring);

    const auto res = simulate_detailed(c);
    const Json cfg = resolved_config(app);
    write_file(out + ".csv", path_csv(res.path));
    Json files = Json::array({out + ".csv"});
    if (res.trees.size() == 1) {
      write_file(out + ".tree.ndjson", serialize_tree(res.trees.front()));
      files.push_back(out + ".tree.ndjson");
    } else {
      for (std::size_t r = 0; r < res.trees.size(); ++r) {
        const auto name = out + ".tree." + std::to_string(r) + ".ndjson";
        write_file(name, serialize_tree(res.trees[r]));
        files.push_back(name);
      }
    }
    if (g.emit_plots) {
      const auto pts = resample_uniform(res.path, 2048);
      std::ostringstream s;
      s << "time,value\n";
      for (const auto& [t, x] : pts) s << report::format_double(t) << ',' << report::format_double(x) << '\n';
      write_file(out + ".plot.csv", s.str());
      files.push_back(out + ".plot.csv");
    }
    Json side = report::path_sidecar(res.path, cfg, g.seed);
    side["roots"] = res.trees.size();
    for (auto& f : files) f = std::filesystem::path(f.get<std::string>()).filename().string();
    side["files"] = files;
    write_file(out + ".json", report::dump(side));
    std::cout << "wrote " << res.path.size() << " knots, " << res.trees.size() << " root crossing(s) to " << out
              << ".{csv,json}\n";
    return kOk;
  }
};

// ---------------------------------------------------------------------------

struct AnalyzeCmd {
  std::string input;
  std::string levels;
  std::string out;
  std::string modulus_levels;
  std::optional<double> hurst;
  std::size_t holder_grid = 0;
  std::string eps = "4:8";
  std::size_t min_crossings = 100;

  void add(CLI::App* app) {
    app->add_option("input", input, "path CSV (time,value)")->required();
    app->add_option("--levels", levels, "inclusive level range LO:HI (default: all feasible)");
    app->add_option("--out", out, "output prefix (default: input without extension)");
    app->add_option("--modulus", modulus_levels, "dyadic range L0:L1 for the modulus ratio");
    app->add_option("--H", hurst, "Hurst index for the modulus gauge (default: estimate)");
    app->add_option("--holder-grid", holder_grid, "grid size for local exponents (0: skip)")->capture_default_str();
    app->add_option("--eps", eps, "epsilon levels J0:J1 for local exponents")->capture_default_str();
    app->add_option("--min-crossings", min_crossings, "per-level minimum for the duration KS check")
        ->capture_default_str();
  }

  int run(CLI::App* app, const Globals& g) {
    auto path = ingest_csv_file(input);
    const auto side_path = std::filesystem::path(input).replace_extension(".json");
    if (std::filesystem::exists(side_path)) {
      try {
        std::ifstream in(side_path);
        const auto side = Json::parse(in);
        if (side.contains("mu") && side["mu"].is_number()) path.mu = side["mu"].get<double>();
        if (side.contains("hurst") && side["hurst"].is_number()) path.hurst = side["hurst"].get<double>();
      } catch (const nlohmann::json::exception&) {
      }
    }
    const auto [lo, hi] = levels.empty() ? feasible_level_range(path) : parse_range(levels, "--levels");
    const auto forest = extract_crossing_forest(path, lo, hi);
    const std::string prefix = out.empty() ? std::filesystem::path(input).replace_extension().string() : out;
    {
      std::ostringstream s;
      report::write_forest_ndjson(forest, s);
      write_file(prefix + ".forest.ndjson", s.str());
    }
    const auto est = estimate_hurst(forest);
    Json result = report::provenance(resolved_config(app), g.seed);
    result["levels"] = {lo, hi};
    result["knots"] = path.size();
    result["estimate"] = report::to_json(est);
    const auto pmf = subcrossing_pmf(forest);
    Json pj = Json::object();
    for (const auto& [z, p] : pmf) pj[std::to_string(z)] = p;
    result["subcrossing_pmf"] = pj;
    result["tv_to_geometric_pairs"] = tv_distance_to_geometric_pairs(pmf);
    const double mu = path.mu.value_or(est.mu_hat);
    try {
      const std::vector<CrossingForest> one{forest};
      result["duration_scale_invariance"] = report::to_json(duration_scale_invariance(one, mu, min_crossings));
    } catch (const Error& e) {
      result["duration_scale_invariance"] = {{"skipped", e.what()}};
    }
    const double h = hurst.value_or(est.hurst_hat);
    std::optional<ModulusReport> mod;
    if (!modulus_levels.empty()) {
      const auto [l0, l1] = parse_range(modulus_levels, "--modulus");
      mod = modulus_ratio(normalize_time(path), l0, l1, h);
      result["modulus"] = report::to_json(*mod);
    }
    std::optional<HolderEstimate> hol;
    if (holder_grid > 0) {
      const auto [j0, j1] = parse_range(eps, "--eps");
      hol = holder_histogram(normalize_time(path), holder_grid, {j0, j1});
      result["holder"] = report::to_json(*hol);
    }
    write_file(prefix + ".estimates.json", report::dump(result));
    if (g.emit_plots) {
      std::vector<double> lv, mc;
      for (const auto& l : est.per_level) {
        if (l.parents == 0) continue;
        lv.push_back(l.level);
        mc.push_back(l.mean_count);
      }
      std::ostringstream s;
      report::write_xy_csv(lv, mc, s, "level", "mean_count");
      write_file(prefix + ".counts.plot.csv", s.str());
      if (mod) {
        std::ostringstream m;
        std::vector<double> ls(mod->levels.begin(), mod->levels.end());
        report::write_xy_csv(ls, mod->ratios, m, "l", "ratio");
        write_file(prefix + ".modulus.plot.csv", m.str());
      }
      if (hol) {
        std::vector<double> centers, counts;
        for (std::size_t i = 0; i < hol->histogram.size(); ++i) {
          centers.push_back((static_cast<double>(i) + 0.5) * hol->bin_width);
          counts.push_back(static_cast<double>(hol->histogram[i]));
        }
        std::ostringstream m;
        report::write_xy_csv(centers, counts, m, "exponent", "count");
        write_file(prefix + ".holder.plot.csv", m.str());
      }
    }
    std::cout << "levels " << lo << ":" << hi << "  mu_hat " << est.mu_hat << "  hurst_hat " << est.hurst_hat
              << " +- " << est.stderr_hurst << "  (" << est.parents << " parent crossings)\n";
    return kOk;
  }
};

// ---------------------------------------------------------------------------

struct VerifyCmd {
  std::string suite;
  FamilyFlags fam;
  std::optional<std::size_t> samples, ensemble, records, records_per_path, seeds, paths, min_crossings, grid;
  std::optional<int> generations, depth, lag, level, w_generations, zeta_max, y_max;
  std::optional<double> tolerance;
  std::string out;

  void add(CLI::App* app) {
    app->add_option("suite", suite, "w-tail | increments | remaining-time | modulus | holder | scale-invariance | "
                                    "assumptions | round-trip | brownian")
        ->required();
    fam.add(app, true);
    // Family defaults only apply when a family flag is given explicitly.
    app->add_option("--samples", samples, "w-tail: W samples per family");
    app->add_option("--generations", generations, "w-tail: generations k");
    app->add_option("--ensemble", ensemble, "increments: number of paths");
    app->add_option("--depth", depth,
                    "tree depth; for modulus/holder the resolution in binary digits (tree depth ceil(depth*H))");
    app->add_option("--lag", lag, "increments: lag t = mu^-lag");
    app->add_option("--records", records, "remaining-time: number of records");
    app->add_option("--records-per-path", records_per_path, "remaining-time: query times per path");
    app->add_option("--level", level, "remaining-time: level n");
    app->add_option("--w-generations", w_generations, "sampled-mode W generations");
    app->add_option("--seeds", seeds, "modulus/round-trip: paths per family");
    app->add_option("--paths", paths, "scale-invariance: number of paths");
    app->add_option("--min-crossings", min_crossings, "scale-invariance: per-level minimum");
    app->add_option("--grid", grid, "holder: grid size");
    app->add_option("--zeta-max", zeta_max, "assumptions: largest zeta tried");
    app->add_option("--y-max", y_max, "assumptions: largest y checked");
    app->add_option("--tolerance", tolerance, "relative tolerance of the main criterion");
    app->add_option("--out", out, "verdict JSON (default verify-<suite>.json)");
  }

  bool family_given(CLI::App* app) const {
    for (const char* f : {"--family", "--p", "--lambda", "--b", "--pmf", "--H"}) {
      if (app->get_option(f)->count() > 0) return true;
    }
    return false;
  }

  int run(CLI::App* app, const Globals& g) {
    const auto& names = verify::suite_names();
    if (std::find(names.begin(), names.end(), suite) == names.end()) {
      throw UsageError("unknown suite '" + suite + "'");
    }
    const bool fam_given = family_given(app);
    const std::optional<FamilySpec> spec = fam_given ? std::optional(fam.spec()) : std::nullopt;
    verify::Verdict v;
    if (suite == "w-tail") {
      verify::WTailOptions o;
      if (spec) o.families = {*spec};
      if (samples) o.samples = *samples;
      if (generations) o.generations = *generations;
      if (tolerance) o.tolerance = *tolerance;
      v = verify::w_tail(o, g.seed, g.workers);
    } else if (suite == "increments") {
      verify::IncrementOptions o;
      if (spec) o.family = *spec;
      if (ensemble) o.ensemble = *ensemble;
      if (depth) o.depth = *depth;
      if (lag) o.lag_generations = *lag;
      if (tolerance) o.tolerance = *tolerance;
      v = verify::increments(o, g.seed, g.workers);
    } else if (suite == "remaining-time") {
      verify::RemainingTimeOptions o;
      if (spec) o.family = *spec;
      if (depth) o.depth = *depth;
      if (level) o.level = *level;
      if (records) o.records = *records;
      if (records_per_path) o.records_per_path = *records_per_path;
      if (w_generations) o.w_generations = *w_generations;
      if (tolerance) o.tolerance = *tolerance;
      v = verify::remaining_time(o, g.seed, g.workers);
    } else if (suite == "modulus") {
      verify::ModulusOptions o;
      if (spec) o.families = {*spec};
      if (depth) o.resolution_bits = *depth;
      if (seeds) o.seeds = *seeds;
      v = verify::modulus(o, g.seed, g.workers);
    } else if (suite == "holder") {
      verify::HolderOptions o;
      if (spec) o.family = *spec;
      if (depth) o.resolution_bits = *depth;
      if (grid) o.grid = *grid;
      if (tolerance) o.tolerance = *tolerance;
      v = verify::holder(o, g.seed, g.workers);
    } else if (suite == "scale-invariance") {
      verify::ScaleInvarianceOptions o;
      if (spec) o.family = *spec;
      if (depth) o.depth = *depth;
      if (paths) o.paths = *paths;
      if (w_generations) o.w_generations = *w_generations;
      if (min_crossings) o.min_crossings = *min_crossings;
      v = verify::scale_invariance(o, g.seed, g.workers);
    } else if (suite == "assumptions") {
      verify::AssumptionOptions o;
      if (spec) o.family = *spec;
      if (zeta_max) o.zeta_max = *zeta_max;
      o.y_max = y_max;
      v = verify::assumptions(o);
    } else if (suite == "round-trip") {
      verify::RoundTripOptions o;
      if (spec) o.families = {*spec};
      if (seeds) o.seeds = *seeds;
      if (depth) o.depth = *depth;
      v = verify::round_trip(o, g.seed, g.workers);
    } else {
      verify::BrownianOptions o;
      if (depth) o.cebp_depth = *depth;
      v = verify::brownian(o, g.seed);
    }
    Json j = verify::to_json(v, g.seed);
    j["config"] = resolved_config(app);
    j["resolved_options"] = v.config;
    const std::string file = out.empty() ? "verify-" + suite + ".json" : out;
    write_file(file, report::dump(j));
    if (g.emit_plots) emit_plots(v, file);
    for (const auto& c : v.criteria) std::cout << (c.pass ? "PASS " : "FAIL ") << c.id << '\n';
    std::cout << (v.pass() ? "all criteria pass" : "some criteria fail") << "; verdict in " << file << '\n';
    return v.pass() ? kOk : kAnalysis;
  }

  static void emit_plots(const verify::Verdict& v, const std::string& file) {
    const auto stem = std::filesystem::path(file).replace_extension().string();
    for (const auto& c : v.criteria) {
      std::string name = c.id;
      std::replace_if(name.begin(), name.end(), [](char ch) { return !std::isalnum(static_cast<unsigned char>(ch)); },
                      '_');
      const Json* fit = nullptr;
      if (c.numbers.contains("log_minus_log_p")) fit = &c.numbers;
      if (c.numbers.contains("fit") && c.numbers["fit"].contains("log_minus_log_p")) fit = &c.numbers["fit"];
      if (fit != nullptr) {
        std::ostringstream s;
        s << "x,p_hat,log_minus_log_p\n";
        const auto& x = (*fit)["abscissa"];
        for (std::size_t i = 0; i < x.size(); ++i) {
          s << report::format_double(x[i].get<double>()) << ','
            << report::format_double((*fit)["p_hat"][i].get<double>()) << ','
            << report::format_double((*fit)["log_minus_log_p"][i].get<double>()) << '\n';
        }
        write_file(stem + "." + name + ".plot.csv", s.str());
      }
      if (c.numbers.contains("per_level")) {
        std::ostringstream s;
        s << "l,max_ratio\n";
        for (const auto& row : c.numbers["per_level"]) {
          s << row["l"].get<int>() << ',' << report::format_double(row["max"].get<double>()) << '\n';
        }
        write_file(stem + "." + name + ".plot.csv", s.str());
      }
    }
  }
};

// ---------------------------------------------------------------------------

struct CheckDistCmd {
  FamilyFlags fam;
  int zeta_max = 10;
  std::optional<int> y_max;
  std::size_t w_samples = 0;
  int generations = 12;
  std::string out;

  void add(CLI::App* app) {
    fam.add(app, true);
    app->add_option("--zeta-max", zeta_max, "largest zeta tried in the dominance check")->capture_default_str();
    app->add_option("--y-max", y_max, "largest y checked (default: max support - 1)");
    app->add_option("--w-samples", w_samples, "also draw this many W samples and fit the left tail")
        ->capture_default_str();
    app->add_option("--generations", generations, "generations per W sample")->capture_default_str();
    app->add_option("--out", out, "output prefix (default: print JSON)");
  }

  int run(CLI::App* app, const Globals& g) {
    const auto dist = make_offspring(fam.spec());
    Json j = report::provenance(resolved_config(app), g.seed);
    j["offspring"] = report::to_json(dist.spec());
    j["mu"] = dist.mu();
    j["pi"] = dist.pi();
    j["hurst"] = dist.hurst();
    j["max_z"] = dist.max_z();
    Json pmf = Json::object();
    for (const auto& e : dist.pmf()) pmf[std::to_string(e.z)] = e.p;
    j["pmf"] = pmf;
    j["moments"] = report::to_json(check_assumption_gw(dist));
    j["dominance"] = report::to_json(check_assumption_z(dist, zeta_max, y_max));
    j["mean_matrix"] = report::to_json(mean_offspring_matrix(dist.mu(), dist.mu()));
    if (w_samples > 0) {
      WSampleOptions wo;
      wo.workers = g.workers;
      const auto ens = sample_W(dist, generations, w_samples, g.seed, wo);
      const double n = static_cast<double>(w_samples);
      const auto fit = w_left_tail_fit(ens, lower_tail_grid(ens.samples, 12, std::min(0.05, 10.0 / n), 0.1));
      j["w_tail"] = report::to_json(fit);
      if (!out.empty()) {
        std::ostringstream w, t;
        report::write_w_ensemble_csv(ens, w);
        report::write_tail_fit_csv(fit, t);
        write_file(out + ".w.csv", w.str());
        write_file(out + ".wtail.csv", t.str());
      }
    }
    if (out.empty()) {
      std::cout << report::dump(j);
    } else {
      write_file(out + ".json", report::dump(j));
      std::cout << "mu " << dist.mu() << "  H " << dist.hurst() << "; report in " << out << ".json\n";
    }
    return kOk;
  }
};

// ---------------------------------------------------------------------------

struct IngestCmd {
  std::string input;
  std::size_t time_col = 0;
  std::size_t value_col = 1;
  bool anchor = true;
  std::string out;

  void add(CLI::App* app) {
    app->add_option("input", input, "CSV file with a time column and a value column")->required();
    app->add_option("--time-col", time_col, "0-based time column")->capture_default_str();
    app->add_option("--value-col", value_col, "0-based value column")->capture_default_str();
    app->add_option("--anchor", anchor, "shift values so the first sample is 0")->capture_default_str();
    app->add_option("--out", out, "output prefix (default: <input>.ingested)");
  }

  int run(CLI::App* app, const Globals& g) {
    CsvColumns cols;
    cols.time = time_col;
    cols.value = value_col;
    cols.anchor_at_zero = anchor;
    const auto path = ingest_csv_file(input, cols);
    const std::string prefix =
        out.empty() ? std::filesystem::path(input).replace_extension().string() + ".ingested" : out;
    write_file(prefix + ".csv", path_csv(path));
    const auto [lo, hi] = feasible_level_range(path);
    Json side = report::path_sidecar(path, resolved_config(app), g.seed);
    side["feasible_levels"] = {lo, hi};
    write_file(prefix + ".json", report::dump(side));
    std::cout << path.size() << " samples, resolution level " << path.resolution_level << ", feasible levels " << lo
              << ":" << hi << "; wrote " << prefix << ".{csv,json}\n";
    return kOk;
  }
};

struct ValidateCmd {
  std::string input;

  void add(CLI::App* app) { app->add_option("input", input, "tree NDJSON file")->required(); }

  int run(CLI::App*, const Globals&) {
    std::ifstream in(input);
    if (!in) throw UsageError("cannot open " + input);
    const auto tree = deserialize_tree(in);
    if (const auto bad = validate_tree(tree)) {
      std::cout << "invalid: " << *bad << '\n';
      return kAnalysis;
    }
    std::cout << "valid: " << tree.size() << " nodes, depth " << tree.depth() << '\n';
    return kOk;
  }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Canonical embedded branching process: simulation, crossing-tree extraction and verification"};
  app.set_version_flag("--version", std::string(report::tool_version()));
  app.require_subcommand(1);

  Globals g;
  SimulateCmd sim;
  AnalyzeCmd ana;
  VerifyCmd ver;
  CheckDistCmd chk;
  IngestCmd ing;
  ValidateCmd val;

  auto* s_sim = app.add_subcommand("simulate", "simulate a path; writes CSV, tree NDJSON and a JSON sidecar");
  auto* s_ana = app.add_subcommand("analyze", "extract the crossing forest of a path and estimate H");
  auto* s_ver = app.add_subcommand("verify", "run a verification suite; exit 0 iff all criteria pass");
  auto* s_chk = app.add_subcommand("check-dist", "offspring law summary and assumption checks");
  auto* s_ing = app.add_subcommand("ingest", "read external time,value data into a path");
  auto* s_val = app.add_subcommand("validate", "check the invariants of a tree NDJSON file");
  for (auto* s : {s_sim, s_ana, s_ver, s_chk, s_ing, s_val}) add_globals(s, g);
  sim.add(s_sim);
  ana.add(s_ana);
  ver.add(s_ver);
  chk.add(s_chk);
  ing.add(s_ing);
  val.add(s_val);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    std::cerr << "run with --help for usage\n";
    return kUsage;
  }

  CLI::App* sub = app.get_subcommands().front();
  try {
    if (!g.config.empty()) apply_config(sub, g.config);
    if (sub == s_sim) return sim.run(sub, g);
    if (sub == s_ana) return ana.run(sub, g);
    if (sub == s_ver) return ver.run(sub, g);
    if (sub == s_chk) return chk.run(sub, g);
    if (sub == s_ing) return ing.run(sub, g);
    return val.run(sub, g);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kAnalysis;
  }
}
